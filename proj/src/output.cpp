#include "ephsim/output.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace ephsim {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

std::string fmt(const char* spec, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// 1-2-5 ticks covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (span / step <= 6.0) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
    ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  }
  return ticks;
}

constexpr std::array<const char*, 6> kColors = {"#1f4e9c", "#c0392b", "#2e8b57",
                                                "#8e44ad", "#d68910", "#34495e"};

}  // namespace

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw std::logic_error("write_csv: row width does not match header for " + path.string());
    }
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt("%.17g", row[i]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_svg_plot(const std::filesystem::path& path, const PlotSpec& spec,
                    const std::vector<PlotSeries>& series) {
  constexpr double width = 720.0, height = 450.0;
  constexpr double left = 90.0, right = 160.0, top = 40.0, bottom = 60.0;
  const double pw = width - left - right;
  const double ph = height - top - bottom;

  auto tx = [&](double x) { return spec.log_x ? std::log10(x) : x; };
  auto ty = [&](double y) { return spec.log_y ? std::log10(y) : y; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!spec.log_x || x > 0.0) &&
           (!spec.log_y || y > 0.0);
  };

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      xmin = std::min(xmin, tx(s.x[i]));
      xmax = std::max(xmax, tx(s.x[i]));
      ymin = std::min(ymin, ty(s.y[i]));
      ymax = std::max(ymax, ty(s.y[i]));
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  }
  if (xmax - xmin <= 0.0) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin <= std::abs(ymax) * 1e-9 || ymax - ymin <= 0.0) {
    const double pad = std::max(std::abs(ymax) * 0.05, 1e-12);
    ymin -= pad;
    ymax += pad;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) { return left + pw * (x - xmin) / (xmax - xmin); };
  auto py = [&](double y) { return top + ph * (1.0 - (y - ymin) / (ymax - ymin)); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(spec.title) << "</text>\n";
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : nice_ticks(xmin, xmax)) {
    const std::string label = spec.log_x ? "1e" + fmt("%g", t) : fmt("%g", t);
    svg << "<line x1=\"" << fmt("%.2f", px(t)) << "\" y1=\"" << top + ph << "\" x2=\""
        << fmt("%.2f", px(t)) << "\" y2=\"" << top + ph + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt("%.2f", px(t)) << "\" y=\"" << top + ph + 18
        << "\" text-anchor=\"middle\">" << label << "</text>\n";
  }
  for (double t : nice_ticks(ymin, ymax)) {
    const std::string label = spec.log_y ? "1e" + fmt("%g", t) : fmt("%g", t);
    svg << "<line x1=\"" << left - 5 << "\" y1=\"" << fmt("%.2f", py(t)) << "\" x2=\"" << left
        << "\" y2=\"" << fmt("%.2f", py(t)) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << fmt("%.2f", py(t) + 4)
        << "\" text-anchor=\"end\">" << label << "</text>\n";
  }
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15
      << "\" text-anchor=\"middle\">" << xml_escape(spec.x_label) << "</text>\n";
  svg << "<text transform=\"translate(20," << top + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << xml_escape(spec.y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % kColors.size()];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i) {
      if (!usable(series[s].x[i], series[s].y[i])) continue;
      svg << (first ? "" : " ") << fmt("%.2f", px(tx(series[s].x[i]))) << ","
          << fmt("%.2f", py(ty(series[s].y[i])));
      first = false;
    }
    svg << "\"/>\n";
    const double ly = top + 15.0 + 18.0 * static_cast<double>(s);
    svg << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 30
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << left + pw + 35 << "\" y=\"" << ly + 4 << "\">"
        << xml_escape(series[s].label) << "</text>\n";
  }
  svg << "</svg>\n";

  auto out = open_out(path);
  out << svg.str();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                               &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    const auto got = in.gcount();
    if (got > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(got));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    char b[3];
    std::snprintf(b, sizeof b, "%02x", md[i]);
    hex += b;
  }
  return hex;
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& entries,
                    const std::vector<std::string>& files) {
  const auto dir = path.parent_path();
  std::ostringstream text;
  for (const auto& [k, v] : entries) text << k << ": " << v << '\n';
  for (const auto& name : files) text << "file " << sha256_file(dir / name) << ' ' << name << '\n';
  auto out = open_out(path);
  out << text.str();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<std::string> verify_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return {"cannot read manifest '" + path.string() + "'"};
  const auto dir = path.parent_path();
  std::vector<std::string> problems;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("file ", 0) != 0) continue;
    std::istringstream fields(line.substr(5));
    std::string hash, name;
    fields >> hash;
    std::getline(fields >> std::ws, name);
    const auto target = dir / name;
    if (!std::filesystem::exists(target)) {
      problems.push_back("missing: " + name);
    } else if (sha256_file(target) != hash) {
      problems.push_back("hash mismatch: " + name);
    }
  }
  return problems;
}

}  // namespace ephsim
