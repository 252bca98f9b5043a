#include "ephsim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ephsim/wavepacket.hpp"

namespace ephsim {

namespace {

struct ExperimentInfo {
  Experiment id;
  std::string_view name;
  std::string_view summary;
};

constexpr ExperimentInfo kExperiments[] = {
    {Experiment::fig3_scan, "fig3_scan", "joint detection G2 versus delta_x across the hole"},
    {Experiment::which_path, "which_path",
     "oscillator amplitudes for packets launched at different offsets"},
    {Experiment::fock_oracle, "fock_oracle",
     "truncated Fock evolution against the product coherent state"},
    {Experiment::visibility_table, "visibility_table",
     "interference visibility versus photons lost and delta_t / tau_D"},
    {Experiment::loss_budget, "loss_budget", "largest photon loss keeping a visibility floor"},
    {Experiment::chain_scan, "chain_scan", "added noise of balanced loss/gain chains versus n_A"},
    {Experiment::dispersion_check, "dispersion_check",
     "mode-resolved second-order drift of matched absorber and amplifier"},
};

// Thrown by value parsers; the caller adds key and line.
struct BadValue {
  std::string expected;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string show_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double read_real(std::string_view text, const std::string& expected) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty() || !std::isfinite(v)) {
    throw BadValue{expected};
  }
  return v;
}

std::uint64_t read_uint(std::string_view text, const std::string& expected) {
  std::uint64_t v = 0;
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), last, v);
  if (ec != std::errc() || ptr != last || text.empty()) throw BadValue{expected};
  return v;
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(trim(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

enum class Bound { any, positive, non_negative, open_unit, at_least_one };

bool within(double v, Bound b) {
  switch (b) {
    case Bound::any: return true;
    case Bound::positive: return v > 0.0;
    case Bound::non_negative: return v >= 0.0;
    case Bound::open_unit: return v > 0.0 && v < 1.0;
    case Bound::at_least_one: return v >= 1.0;
  }
  return false;
}

std::string describe(Bound b) {
  switch (b) {
    case Bound::any: return "real number";
    case Bound::positive: return "real number > 0";
    case Bound::non_negative: return "real number >= 0";
    case Bound::open_unit: return "real number in (0, 1)";
    case Bound::at_least_one: return "real number >= 1";
  }
  return "real number";
}

struct Field {
  std::string name;
  std::function<void(std::string_view)> parse;
  std::function<std::string()> show;
};

Field real_field(std::string name, double& v, Bound b) {
  return {std::move(name),
          [&v, b](std::string_view t) {
            const double x = read_real(t, describe(b));
            if (!within(x, b)) throw BadValue{describe(b)};
            v = x;
          },
          [&v] { return show_real(v); }};
}

Field count_field(std::string name, std::size_t& v, std::size_t min) {
  const std::string expected = "integer >= " + std::to_string(min);
  return {std::move(name),
          [&v, min, expected](std::string_view t) {
            const auto x = read_uint(t, expected);
            if (x < min) throw BadValue{expected};
            v = static_cast<std::size_t>(x);
          },
          [&v] { return std::to_string(v); }};
}

Field bool_field(std::string name, bool& v) {
  return {std::move(name),
          [&v](std::string_view t) {
            if (t == "true") {
              v = true;
            } else if (t == "false") {
              v = false;
            } else {
              throw BadValue{"true or false"};
            }
          },
          [&v] { return std::string(v ? "true" : "false"); }};
}

Field reals_field(std::string name, std::vector<double>& v, Bound b) {
  return {std::move(name),
          [&v, b](std::string_view t) {
            const std::string expected = "comma-separated list of " + describe(b);
            std::vector<double> out;
            for (auto item : split_list(t)) {
              const double x = read_real(item, expected);
              if (!within(x, b)) throw BadValue{expected};
              out.push_back(x);
            }
            v = std::move(out);
          },
          [&v] {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + show_real(v[i]);
            return s;
          }};
}

Field counts_field(std::string name, std::vector<std::size_t>& v, std::size_t min) {
  return {std::move(name),
          [&v, min](std::string_view t) {
            const std::string expected = "comma-separated list of integers >= " +
                                         std::to_string(min);
            std::vector<std::size_t> out;
            for (auto item : split_list(t)) {
              const auto x = read_uint(item, expected);
              if (x < min) throw BadValue{expected};
              out.push_back(static_cast<std::size_t>(x));
            }
            v = std::move(out);
          },
          [&v] {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
            return s;
          }};
}

Field profile_field(std::string name, HoleProfile& v) {
  return {std::move(name),
          [&v](std::string_view t) {
            if (t == "smoothstep") {
              v = HoleProfile::smoothstep;
            } else if (t == "flat") {
              v = HoleProfile::flat;
            } else {
              throw BadValue{"smoothstep or flat"};
            }
          },
          [&v] { return std::string(v == HoleProfile::flat ? "flat" : "smoothstep"); }};
}

std::vector<Field> fields(Fig3Params& p) {
  return {real_field("sigma_p", p.sigma_p, Bound::positive),
          real_field("d", p.d, Bound::positive),
          real_field("alpha_sq", p.alpha_sq, Bound::positive),
          count_field("nodes", p.nodes, 2),
          real_field("box", p.box, Bound::positive),
          real_field("k0", p.k0, Bound::positive),
          count_field("n_modes", p.n_modes, 0),
          real_field("dx_max", p.dx_max, Bound::positive),
          count_field("samples", p.samples, 3),
          profile_field("profile", p.profile),
          bool_field("control", p.control),
          count_field("mc_samples", p.mc_samples, 0),
          real_field("mc_tolerance", p.mc_tolerance, Bound::positive)};
}

std::vector<Field> fields(WhichPathParams& p) {
  return {real_field("k0", p.k0, Bound::positive),
          real_field("sigma_p", p.sigma_p, Bound::positive),
          count_field("n_modes", p.n_modes, 16),
          real_field("alpha_sq", p.alpha_sq, Bound::positive),
          real_field("epsilon", p.epsilon, Bound::positive),
          real_field("omega0", p.omega0, Bound::non_negative),
          real_field("offset_min", p.offset_min, Bound::any),
          real_field("offset_max", p.offset_max, Bound::any),
          count_field("offset_count", p.offset_count, 2),
          reals_field("oscillator_positions", p.oscillator_positions, Bound::any),
          real_field("t_end", p.t_end, Bound::positive),
          real_field("dt_factor", p.dt_factor, Bound::positive),
          real_field("threshold", p.threshold, Bound::positive),
          bool_field("convergence", p.convergence),
          real_field("contrast_detuning", p.contrast_detuning, Bound::non_negative)};
}

std::vector<Field> fields(FockScenarioParams& p) {
  auto& o = p.oracle;
  Field alpha0{"alpha0",
               [&o](std::string_view t) { o.alpha0 = read_real(t, "real number"); },
               [&o] { return show_real(o.alpha0.real()); }};
  return {std::move(alpha0),
          real_field("epsilon", o.epsilon, Bound::positive),
          real_field("omega0", o.omega0, Bound::positive),
          real_field("t_end", o.t_end, Bound::positive),
          count_field("truncation", o.truncation, 2),
          count_field("checkpoints", o.checkpoints, 1),
          real_field("dt_factor", o.dt_factor, Bound::positive),
          real_field("fidelity_tolerance", p.fidelity_tolerance, Bound::open_unit),
          real_field("control_threshold", p.control_threshold, Bound::open_unit)};
}

std::vector<Field> fields(VisibilityTableParams& p) {
  return {reals_field("ratios", p.ratios, Bound::positive),
          reals_field("losses", p.losses, Bound::non_negative),
          real_field("c_i", p.c_i, Bound::non_negative),
          real_field("beamsplitter_n_bar", p.beamsplitter_n_bar, Bound::non_negative)};
}

std::vector<Field> fields(LossBudgetParams& p) {
  return {reals_field("ratios", p.ratios, Bound::positive),
          reals_field("floors", p.floors, Bound::open_unit)};
}

std::vector<Field> fields(ChainScanParams& p) {
  return {real_field("total_gain", p.total_gain, Bound::at_least_one),
          counts_field("n_amplifiers", p.n_amplifiers, 1)};
}

std::vector<Field> fields(DispersionCheckParams& p) {
  return {real_field("k0", p.k0, Bound::positive),
          real_field("sigma_p", p.sigma_p, Bound::positive),
          count_field("n_modes", p.n_modes, 16),
          real_field("alpha_sq", p.alpha_sq, Bound::positive),
          real_field("epsilon", p.epsilon, Bound::positive),
          real_field("bank_start", p.bank_start, Bound::any),
          real_field("bank_end", p.bank_end, Bound::any),
          count_field("bank_count", p.bank_count, 1),
          real_field("x1", p.x1, Bound::any),
          real_field("t", p.t, Bound::positive),
          real_field("tolerance", p.tolerance, Bound::positive)};
}

ExperimentParams default_params(Experiment e) {
  switch (e) {
    case Experiment::fig3_scan: return Fig3Params{};
    case Experiment::which_path: return WhichPathParams{};
    case Experiment::fock_oracle: return FockScenarioParams{};
    case Experiment::visibility_table: return VisibilityTableParams{};
    case Experiment::loss_budget: return LossBudgetParams{};
    case Experiment::chain_scan: return ChainScanParams{};
    case Experiment::dispersion_check: return DispersionCheckParams{};
  }
  return Fig3Params{};
}

using LineOf = std::function<std::size_t(const std::string&)>;

[[noreturn]] void reject(const LineOf& line_of, const std::string& key, const std::string& msg) {
  throw ScenarioError(key, line_of(key), msg);
}

// Packets need k0 - 8/sigma_p > 0 and a window pi/dk covering `span`.
void check_mode_grid(const LineOf& line_of, double k0, double sigma_p, std::size_t n_modes,
                     double span) {
  if (!(k0 - 8.0 / sigma_p > 0.0)) {
    reject(line_of, "k0", "k0 must exceed 8 / sigma_p so every mode has positive k");
  }
  if (n_modes == 0) return;
  if (n_modes < 16) reject(line_of, "n_modes", "n_modes must be 0 (automatic) or >= 16");
  const double window = kPi * sigma_p * static_cast<double>(n_modes - 1) / 16.0;
  if (span > window) {
    reject(line_of, "n_modes",
           "n_modes = " + std::to_string(n_modes) + " gives an alias-free window of " +
               show_real(window) + ", below the required " + show_real(span));
  }
}

void validate(const Fig3Params& p, const LineOf& line_of) {
  if (p.d < 10.0 * p.sigma_p) {
    reject(line_of, "d", "d = " + show_real(p.d) + " violates d >= 10 sigma_p");
  }
  const double spacing = p.box / static_cast<double>(p.nodes - 1);
  if (spacing > 0.5 * p.sigma_p * (1.0 + 1e-12)) {
    reject(line_of, "nodes",
           "node spacing box/(nodes-1) = " + show_real(spacing) + " exceeds sigma_p/2");
  }
  check_mode_grid(line_of, p.k0, p.sigma_p, p.n_modes, p.box);
  if (0.5 * p.dx_max + 8.0 * p.sigma_p > 0.5 * p.box) {
    reject(line_of, "dx_max", "dx_max/2 + 8 sigma_p must not exceed box/2");
  }
  if (p.profile == HoleProfile::smoothstep && p.dx_max < 4.0 * p.d) {
    reject(line_of, "dx_max", "dx_max must reach the plateau onset 4d");
  }
  if (p.mc_samples != 0 && p.mc_samples < 4) {
    reject(line_of, "mc_samples", "mc_samples must be 0 (off) or >= 4");
  }
}

void validate(const WhichPathParams& p, const LineOf& line_of) {
  if (!(p.offset_max > p.offset_min)) {
    reject(line_of, "offset_max", "offset_max must exceed offset_min");
  }
  if (p.oscillator_positions.empty()) {
    reject(line_of, "oscillator_positions", "at least one oscillator position is required");
  }
  // Packet tails beyond 6 sigma_p carry less than 1e-9 of the norm.
  const double reach = 6.0 * p.sigma_p;
  const auto [lo, hi] =
      std::minmax_element(p.oscillator_positions.begin(), p.oscillator_positions.end());
  if (*lo < p.offset_max + reach) {
    reject(line_of, "oscillator_positions",
           "every oscillator must lie at least 6 sigma_p downstream of offset_max");
  }
  if (p.offset_min + p.t_end < *hi + reach) {
    reject(line_of, "t_end", "t_end too short for the packet from offset_min to pass every "
                             "oscillator by 6 sigma_p");
  }
  check_mode_grid(line_of, p.k0, p.sigma_p, p.n_modes, 0.0);
  if (p.dt_factor > 0.05) reject(line_of, "dt_factor", "dt_factor must be <= 0.05");
}

void validate(const FockScenarioParams& p, const LineOf& line_of) {
  if (p.oracle.dt_factor > 0.05) reject(line_of, "dt_factor", "dt_factor must be <= 0.05");
}

void validate(const VisibilityTableParams& p, const LineOf& line_of) {
  if (p.ratios.empty()) reject(line_of, "ratios", "at least one ratio is required");
  if (p.losses.empty()) reject(line_of, "losses", "at least one loss count is required");
  for (double n : p.losses) {
    if (n != std::floor(n)) reject(line_of, "losses", "photon losses must be whole numbers");
  }
}

void validate(const LossBudgetParams&, const LineOf&) {}

void validate(const ChainScanParams&, const LineOf&) {}

void validate(const DispersionCheckParams& p, const LineOf& line_of) {
  if (p.bank_end < p.bank_start) reject(line_of, "bank_end", "bank_end must be >= bank_start");
  if (p.x1 + 6.0 * p.sigma_p > p.bank_start) {
    reject(line_of, "x1", "the packet must start at least 6 sigma_p upstream of bank_start");
  }
  check_mode_grid(line_of, p.k0, p.sigma_p, p.n_modes, 0.0);
}

struct RawEntry {
  std::string value;
  std::size_t line = 0;
};

}  // namespace

std::string_view experiment_name(Experiment e) {
  for (const auto& info : kExperiments) {
    if (info.id == e) return info.name;
  }
  return "unknown";
}

std::optional<Experiment> experiment_from_name(std::string_view name) {
  for (const auto& info : kExperiments) {
    if (info.name == name) return info.id;
  }
  return std::nullopt;
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (const auto& info : kExperiments) v.push_back(info.id);
    return v;
  }();
  return all;
}

std::string_view experiment_summary(Experiment e) {
  for (const auto& info : kExperiments) {
    if (info.id == e) return info.summary;
  }
  return {};
}

MissingFileError::MissingFileError(const std::filesystem::path& path)
    : std::runtime_error("cannot open scenario file '" + path.string() + "'"), path_(path) {}

ScenarioError::ScenarioError(std::string key, std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + key + ": " + message
                                  : key + ": " + message),
      key_(std::move(key)),
      line_(line) {}

std::vector<std::string> experiment_keys(Experiment e) {
  auto params = default_params(e);
  return std::visit(
      [](auto& p) {
        std::vector<std::string> names;
        for (const auto& f : fields(p)) names.push_back(f.name);
        return names;
      },
      params);
}

Scenario parse_scenario(std::string_view text, std::string_view origin) {
  std::map<std::string, RawEntry> top;
  std::map<std::string, RawEntry> section;
  std::string section_name;
  std::size_t section_line = 0;

  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ScenarioError("[section]", line_no, "unterminated section header");
      }
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (!section_name.empty()) {
        throw ScenarioError(name, line_no,
                            "only one experiment section is allowed (already have [" +
                                section_name + "])");
      }
      if (!experiment_from_name(name)) {
        throw ScenarioError(name, line_no, "unknown section; expected an experiment name");
      }
      section_name = name;
      section_line = line_no;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ScenarioError(std::string(line), line_no, "expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ScenarioError("(empty)", line_no, "missing key before '='");
    auto& target = section_name.empty() ? top : section;
    if (target.count(key) != 0) {
      throw ScenarioError(key, line_no,
                          "duplicate key (first set on line " +
                              std::to_string(target[key].line) + ")");
    }
    target[key] = RawEntry{value, line_no};
  }

  Scenario sc;
  for (const auto& [key, entry] : top) {
    if (key != "experiment" && key != "seed" && key != "output_dir") {
      throw ScenarioError(key, entry.line,
                          "unknown top-level key; expected experiment, seed or output_dir");
    }
  }
  const auto exp_it = top.find("experiment");
  if (exp_it == top.end()) {
    throw ScenarioError("experiment", 0,
                        "missing required top-level key in " + std::string(origin));
  }
  const auto exp = experiment_from_name(exp_it->second.value);
  if (!exp) {
    std::string names;
    for (const auto& info : kExperiments) names += (names.empty() ? "" : ", ") + std::string(info.name);
    throw ScenarioError("experiment", exp_it->second.line,
                        "unknown experiment '" + exp_it->second.value + "'; expected one of " +
                            names);
  }
  sc.experiment = *exp;
  if (!section_name.empty() && section_name != experiment_name(sc.experiment)) {
    throw ScenarioError(section_name, section_line,
                        "section does not match experiment '" +
                            std::string(experiment_name(sc.experiment)) + "'");
  }
  if (const auto it = top.find("seed"); it != top.end()) {
    try {
      sc.seed = read_uint(it->second.value, "non-negative integer");
    } catch (const BadValue& bad) {
      throw ScenarioError("seed", it->second.line,
                          "expected " + bad.expected + ", got '" + it->second.value + "'");
    }
  }
  if (const auto it = top.find("output_dir"); it != top.end()) {
    if (it->second.value.empty()) {
      throw ScenarioError("output_dir", it->second.line, "expected a non-empty path");
    }
    sc.output_dir = it->second.value;
  }

  sc.params = default_params(sc.experiment);
  const LineOf line_of = [&section](const std::string& key) -> std::size_t {
    const auto it = section.find(key);
    return it == section.end() ? 0 : it->second.line;
  };
  std::visit(
      [&](auto& p) {
        auto schema = fields(p);
        for (const auto& [key, entry] : section) {
          const auto f = std::find_if(schema.begin(), schema.end(),
                                      [&key](const Field& x) { return x.name == key; });
          if (f == schema.end()) {
            throw ScenarioError(key, entry.line,
                                "unknown key for experiment " +
                                    std::string(experiment_name(sc.experiment)));
          }
          try {
            f->parse(entry.value);
          } catch (const BadValue& bad) {
            throw ScenarioError(key, entry.line,
                                "expected " + bad.expected + ", got '" + entry.value + "'");
          }
        }
        validate(p, line_of);
        for (const auto& f : schema) sc.resolved.emplace_back(f.name, f.show());
      },
      sc.params);
  return sc;
}

Scenario parse_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

}  // namespace ephsim
