#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ephsim/scenario.hpp"

namespace ephsim {

/// A library error raised while running, tagged with the scenario keys that
/// feed the failing stage.
class RunError : public std::runtime_error {
 public:
  RunError(std::string experiment, std::string keys, const std::string& message);
  const std::string& keys() const { return keys_; }

 private:
  std::string keys_;
};

struct CheckLine {
  std::string text;  ///< "<quantity> = <value> (<criterion>)"
  bool passed = false;
};

struct RunResult {
  Experiment experiment = Experiment::fig3_scan;
  std::filesystem::path output_dir;
  std::vector<std::string> info;
  std::vector<CheckLine> checks;
  /// Artifacts relative to output_dir, manifest excluded.
  std::vector<std::string> files;
  double wall_time_s = 0.0;

  bool passed() const;
};

/// --out beats $EPHSIM_OUTPUT_DIR beats the file's output_dir beats "sim_out".
std::filesystem::path resolve_output_dir(const Scenario& scenario,
                                         const std::optional<std::string>& cli_out);

/// Runs the experiment, writes its CSV/SVG files, summary.txt and manifest.txt
/// into `output_dir` (created if needed).
RunResult run_scenario(const Scenario& scenario, const std::filesystem::path& output_dir);

/// "PASS" / "FAIL" summary line for one check.
std::string format_check(const CheckLine& check);

std::string tool_version();

}  // namespace ephsim
