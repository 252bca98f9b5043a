#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace ephsim {

/// Writes a CSV with one header row; numbers use %.17g so they round-trip.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;  ///< non-positive x values are dropped
  bool log_y = false;  ///< non-positive y values are dropped
};

/// Polyline plot with axes, tick labels and a legend.
void write_svg_plot(const std::filesystem::path& path, const PlotSpec& spec,
                    const std::vector<PlotSeries>& series);

/// Lower-case hex SHA-256 of the file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// `key: value` lines followed by one `file <sha256> <name>` line per artifact
/// (names relative to the manifest's directory).
void write_manifest(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& entries,
                    const std::vector<std::string>& files);

/// Re-hashes every listed file. Returns one message per missing or mismatched
/// file; empty when the manifest verifies.
std::vector<std::string> verify_manifest(const std::filesystem::path& path);

}  // namespace ephsim
