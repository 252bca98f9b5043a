// sim: run, validate and list desk-scale photon-hole experiments.
//
// Exit status: 0 all invariants pass, 1 an invariant failed, 2 malformed
// scenario or runtime error, 3 scenario file missing.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ephsim/output.hpp"
#include "ephsim/runner.hpp"
#include "ephsim/scenario.hpp"

namespace {

constexpr int kInvariantFailed = 1;
constexpr int kBadScenario = 2;
constexpr int kMissingFile = 3;

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ephsim::MissingFileError& e) {
    std::cerr << "sim: " << e.what() << '\n';
    return kMissingFile;
  } catch (const ephsim::ScenarioError& e) {
    std::cerr << "sim: invalid scenario: " << e.what() << '\n';
    return kBadScenario;
  } catch (const ephsim::RunError& e) {
    std::cerr << "sim: run failed: " << e.what() << '\n';
    return kBadScenario;
  } catch (const std::exception& e) {
    std::cerr << "sim: " << e.what() << '\n';
    return kBadScenario;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entangled photon-hole simulations at desk scale"};
  app.set_version_flag("--version", ephsim::tool_version());
  app.require_subcommand(1);

  std::string run_file;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "run a scenario and write CSV, SVG, summary and manifest");
  run->add_option("scenario", run_file, "scenario file")->required();
  run->add_option("--out", out_dir, "output directory (overrides EPHSIM_OUTPUT_DIR and the file)");
  run->add_option("--seed", seed, "seed for the Monte-Carlo normalization oracle");

  std::string validate_file;
  auto* validate = app.add_subcommand("validate", "parse a scenario and print resolved parameters");
  validate->add_option("scenario", validate_file, "scenario file")->required();

  auto* list = app.add_subcommand("list-experiments", "list experiment names and their keys");

  std::string manifest_dir;
  auto* verify = app.add_subcommand("verify", "re-hash the files listed in DIR/manifest.txt");
  verify->add_option("dir", manifest_dir, "output directory of a previous run")->required();

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    return guarded([&] {
      auto scenario = ephsim::parse_scenario_file(run_file);
      if (seed) scenario.seed = *seed;
      const auto dir = ephsim::resolve_output_dir(scenario, out_dir);
      const auto result = ephsim::run_scenario(scenario, dir);
      for (const auto& line : result.info) std::cout << line << '\n';
      for (const auto& check : result.checks) std::cout << ephsim::format_check(check) << '\n';
      std::cout << "status: " << (result.passed() ? "PASS" : "FAIL") << "  (" << dir.string()
                << ")\n";
      return result.passed() ? 0 : kInvariantFailed;
    });
  }
  if (*validate) {
    return guarded([&] {
      const auto scenario = ephsim::parse_scenario_file(validate_file);
      std::cout << "experiment = " << ephsim::experiment_name(scenario.experiment) << '\n';
      std::cout << "seed = " << scenario.seed << '\n';
      if (!scenario.output_dir.empty()) std::cout << "output_dir = " << scenario.output_dir << '\n';
      std::cout << '[' << ephsim::experiment_name(scenario.experiment) << "]\n";
      for (const auto& [k, v] : scenario.resolved) std::cout << k << " = " << v << '\n';
      return 0;
    });
  }
  if (*list) {
    for (auto e : ephsim::all_experiments()) {
      std::cout << ephsim::experiment_name(e) << "  " << ephsim::experiment_summary(e) << '\n';
      std::cout << "    keys:";
      for (const auto& k : ephsim::experiment_keys(e)) std::cout << ' ' << k;
      std::cout << '\n';
    }
    return 0;
  }
  if (*verify) {
    return guarded([&] {
      const auto problems = ephsim::verify_manifest(std::filesystem::path(manifest_dir) /
                                                    "manifest.txt");
      for (const auto& p : problems) std::cout << p << '\n';
      std::cout << (problems.empty() ? "manifest OK" : "manifest FAILED") << '\n';
      return problems.empty() ? 0 : kInvariantFailed;
    });
  }
  return 0;
}
