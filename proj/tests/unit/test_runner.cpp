#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ephsim/output.hpp"
#include "ephsim/runner.hpp"

using namespace ephsim;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ephsim_run_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("visibility table run writes the e^-1 row and a verifiable manifest") {
  const auto sc = parse_scenario(
      "experiment = visibility_table\n[visibility_table]\nratios = 1e-4, 1e-3, 1e-2\n");
  const auto dir = scratch("vis");
  const auto r = run_scenario(sc, dir);
  CHECK(r.passed());
  const auto csv = slurp(dir / "visibility_table.csv");
  CHECK(csv.find("0.001,1000,0.36787944117144233\n") != std::string::npos);
  CHECK(csv.rfind("R (delta_t / tau_D),n_lost (photons),visibility\n", 0) == 0);
  CHECK(std::filesystem::exists(dir / "visibility_table.svg"));
  CHECK(verify_manifest(dir / "manifest.txt").empty());
  const auto manifest = slurp(dir / "manifest.txt");
  CHECK(manifest.find("status: PASS\n") != std::string::npos);
  CHECK(manifest.find("tool_version: " + tool_version() + "\n") != std::string::npos);
  CHECK(manifest.find("param.ratios: ") != std::string::npos);
}

TEST_CASE("which-path summary line") {
  const auto sc = parse_scenario("experiment = which_path\n[which_path]\nconvergence = false\n"
                                 "contrast_detuning = 0\noffset_count = 3\n");
  const auto dir = scratch("wp");
  const auto r = run_scenario(sc, dir);
  CHECK(r.passed());
  const auto summary = slurp(dir / "summary.txt");
  const auto pos = summary.find("max deviation = ");
  REQUIRE(pos != std::string::npos);
  const auto line = summary.substr(pos, summary.find('\n', pos) - pos);
  CHECK(line.find("(threshold 1e-3): PASS") != std::string::npos);
}

TEST_CASE("identical scenario and seed give byte-identical CSV") {
  const auto sc = parse_scenario("experiment = chain_scan\n");
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  run_scenario(sc, a);
  run_scenario(sc, b);
  CHECK(slurp(a / "chain_scan.csv") == slurp(b / "chain_scan.csv"));
}

TEST_CASE("failed invariants are reported, not hidden") {
  // A Monte Carlo cross-check cannot meet a 1e-12 tolerance with 1e4 samples.
  const auto sc = parse_scenario(
      "experiment = fig3_scan\n[fig3_scan]\nmc_samples = 10000\nmc_tolerance = 1e-12\n");
  const auto dir = scratch("fail");
  const auto r = run_scenario(sc, dir);
  CHECK_FALSE(r.passed());
  CHECK(slurp(dir / "summary.txt").find("status: FAIL") != std::string::npos);
  CHECK(verify_manifest(dir / "manifest.txt").empty());
}

TEST_CASE("library errors surface with the scenario keys involved") {
  // Oscillator close to the ring image of the launch point.
  const auto sc = parse_scenario(
      "experiment = which_path\n[which_path]\nn_modes = 17\noffset_count = 2\n");
  try {
    run_scenario(sc, scratch("err"));
    FAIL("expected RunError");
  } catch (const RunError& e) {
    CHECK(e.keys().find("n_modes") != std::string::npos);
  }
}

TEST_CASE("output directory precedence") {
  auto sc = parse_scenario("experiment = chain_scan\noutput_dir = from_file\n");
  ::unsetenv("EPHSIM_OUTPUT_DIR");
  CHECK(resolve_output_dir(sc, std::nullopt) == "from_file");
  ::setenv("EPHSIM_OUTPUT_DIR", "from_env", 1);
  CHECK(resolve_output_dir(sc, std::nullopt) == "from_env");
  CHECK(resolve_output_dir(sc, std::string("from_cli")) == "from_cli");
  ::unsetenv("EPHSIM_OUTPUT_DIR");
  sc.output_dir.clear();
  CHECK(resolve_output_dir(sc, std::nullopt) == "sim_out");
}
