#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ephsim/fock_oracle.hpp"
#include "ephsim/holestate.hpp"

namespace ephsim {

enum class Experiment {
  fig3_scan,
  which_path,
  fock_oracle,
  visibility_table,
  loss_budget,
  chain_scan,
  dispersion_check,
};

std::string_view experiment_name(Experiment e);
std::optional<Experiment> experiment_from_name(std::string_view name);
const std::vector<Experiment>& all_experiments();
/// One-line description for `sim list-experiments`.
std::string_view experiment_summary(Experiment e);

/// The scenario file could not be opened.
class MissingFileError : public std::runtime_error {
 public:
  explicit MissingFileError(const std::filesystem::path& path);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Malformed or out-of-range scenario content. `line` is 0 when the offending
/// value came from a default.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string key, std::size_t line, const std::string& message);
  const std::string& key() const { return key_; }
  std::size_t line() const { return line_; }

 private:
  std::string key_;
  std::size_t line_;
};

struct Fig3Params {
  double sigma_p = 1.0;
  double d = 10.0;
  double alpha_sq = 10.0;
  std::size_t nodes = 201;
  double box = 100.0;
  double k0 = 20.0;
  std::size_t n_modes = 0;
  double dx_max = 60.0;
  std::size_t samples = 241;
  HoleProfile profile = HoleProfile::smoothstep;
  bool control = true;
  std::size_t mc_samples = 0;
  double mc_tolerance = 1e-4;
};

struct WhichPathParams {
  double k0 = 10.0;
  double sigma_p = 1.0;
  std::size_t n_modes = 129;
  double alpha_sq = 10.0;
  double epsilon = 1e-3;
  /// 0 means resonant (omega0 = k0).
  double omega0 = 0.0;
  double offset_min = 0.0;
  double offset_max = 20.0;
  std::size_t offset_count = 5;
  std::vector<double> oscillator_positions{27.0};
  double t_end = 34.0;
  double dt_factor = 0.01;
  double threshold = 1e-3;
  bool convergence = true;
  /// 0 disables the detuned contrast run.
  double contrast_detuning = 3.0;
};

struct FockScenarioParams {
  FockOracleParams oracle;
  double fidelity_tolerance = 1e-6;
  double control_threshold = 0.999;
};

struct VisibilityTableParams {
  std::vector<double> ratios{1e-4, 1e-3, 1e-2};
  std::vector<double> losses{0.0, 10.0, 100.0, 1000.0, 10000.0};
  double c_i = 1.0;
  double beamsplitter_n_bar = 1.0;
};

struct LossBudgetParams {
  std::vector<double> ratios{1e-4, 1e-3, 1e-2};
  std::vector<double> floors{0.9, 0.5, 0.36787944117144233};
};

struct ChainScanParams {
  double total_gain = 7.38905609893065;  // e^2
  std::vector<std::size_t> n_amplifiers{1, 2, 5, 10, 20, 50, 100};
};

struct DispersionCheckParams {
  double k0 = 10.0;
  double sigma_p = 1.0;
  std::size_t n_modes = 129;
  double alpha_sq = 1.0;
  double epsilon = 1e-3;
  double bank_start = 20.0;
  double bank_end = 30.0;
  std::size_t bank_count = 5;
  double x1 = 0.0;
  double t = 40.0;
  double tolerance = 1e-10;
};

using ExperimentParams =
    std::variant<Fig3Params, WhichPathParams, FockScenarioParams, VisibilityTableParams,
                 LossBudgetParams, ChainScanParams, DispersionCheckParams>;

struct Scenario {
  Experiment experiment = Experiment::fig3_scan;
  std::uint64_t seed = 1;
  /// Empty when the file does not set one.
  std::string output_dir;
  ExperimentParams params;
  /// Every parameter after defaults, as "key", "value" text, in schema order.
  std::vector<std::pair<std::string, std::string>> resolved;
};

/// Parses scenario text. `origin` only labels error messages.
Scenario parse_scenario(std::string_view text, std::string_view origin = "<inline>");
/// Reads and parses a file; throws MissingFileError if it cannot be opened.
Scenario parse_scenario_file(const std::filesystem::path& path);

/// Key names accepted in an experiment's section, in schema order.
std::vector<std::string> experiment_keys(Experiment e);

}  // namespace ephsim
