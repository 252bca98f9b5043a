#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ephsim/output.hpp"

using namespace ephsim;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ephsim_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("CSV rows round-trip at 17 significant digits") {
  const auto dir = scratch("csv");
  const double tiny = 0.1 * 3e-300;
  write_csv(dir / "t.csv", {"x (length)", "y"}, {{0.1, 1.0 / 3.0}, {-2.0, tiny}});
  const auto text = slurp(dir / "t.csv");
  CHECK(text.rfind("x (length),y\n0.10000000000000001,0.33333333333333331\n-2,", 0) == 0);
  CHECK(std::stod(text.substr(text.rfind(',') + 1)) == tiny);
  CHECK_THROWS_AS(write_csv(dir / "bad.csv", {"a"}, {{1.0, 2.0}}), std::logic_error);
}

TEST_CASE("sha256 of a known message") {
  const auto dir = scratch("sha");
  std::ofstream(dir / "abc.txt", std::ios::binary) << "abc";
  CHECK(sha256_file(dir / "abc.txt") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("manifest verifies and detects tampering") {
  const auto dir = scratch("manifest");
  write_csv(dir / "a.csv", {"x"}, {{1.0}});
  write_csv(dir / "b.csv", {"x"}, {{2.0}});
  write_manifest(dir / "manifest.txt", {{"experiment", "test"}}, {"a.csv", "b.csv"});
  const auto text = slurp(dir / "manifest.txt");
  CHECK(text.rfind("experiment: test\nfile ", 0) == 0);
  CHECK(verify_manifest(dir / "manifest.txt").empty());

  write_csv(dir / "b.csv", {"x"}, {{3.0}});
  std::filesystem::remove(dir / "a.csv");
  const auto problems = verify_manifest(dir / "manifest.txt");
  REQUIRE(problems.size() == 2);
  CHECK(problems[0] == "missing: a.csv");
  CHECK(problems[1] == "hash mismatch: b.csv");
}

TEST_CASE("SVG plot contains one polyline per series") {
  const auto dir = scratch("svg");
  write_svg_plot(dir / "p.svg", {"title <&>", "x", "y", true, false},
                 {{"one", {0.0, 1.0, 10.0}, {1.0, 2.0, 3.0}}, {"two", {1.0, 100.0}, {0.5, 0.5}}});
  const auto text = slurp(dir / "p.svg");
  CHECK(text.rfind("<svg", 0) == 0);
  CHECK(text.find("title &lt;&amp;&gt;") != std::string::npos);
  std::size_t count = 0;
  for (auto pos = text.find("<polyline"); pos != std::string::npos;
       pos = text.find("<polyline", pos + 1))
    ++count;
  CHECK(count == 2);
}
