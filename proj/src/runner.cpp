#include "ephsim/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <type_traits>
#include <variant>

#include "ephsim/chain.hpp"
#include "ephsim/decoherence.hpp"
#include "ephsim/dynamics.hpp"
#include "ephsim/fock_oracle.hpp"
#include "ephsim/holestate.hpp"
#include "ephsim/mc_norm.hpp"
#include "ephsim/output.hpp"
#include "ephsim/wavepacket.hpp"

#ifndef EPHSIM_VERSION
#define EPHSIM_VERSION "0.0.0"
#endif

namespace ephsim {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Shortest scientific form: 0.001 -> "1e-3", 2.5e-10 -> "2.5e-10".
std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  std::string s(buf);
  const auto e = s.find('e');
  std::string mant = s.substr(0, e);
  if (mant.find('.') != std::string::npos) {
    mant.erase(mant.find_last_not_of('0') + 1);
    if (mant.back() == '.') mant.pop_back();
  }
  const int exp = std::atoi(s.c_str() + e + 1);
  return mant + "e" + std::to_string(exp);
}

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

struct Context {
  Experiment experiment;
  std::filesystem::path dir;
  RunResult& result;

  void info(const std::string& line) { result.info.push_back(line); }
  void check(const std::string& text, bool ok) { result.checks.push_back({text, ok}); }

  void csv(const std::string& name, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows) {
    write_csv(dir / name, header, rows);
    result.files.push_back(name);
  }
  void svg(const std::string& name, const PlotSpec& spec, const std::vector<PlotSeries>& s) {
    write_svg_plot(dir / name, spec, s);
    result.files.push_back(name);
  }

  // Runs a library stage and re-raises its errors with the keys that feed it.
  template <class F>
  auto stage(const std::string& keys, F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const RunError&) {
      throw;
    } catch (const std::exception& e) {
      throw RunError(std::string(experiment_name(experiment)), keys, e.what());
    }
  }
};

double plateau_spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  return (*hi - *lo) / mean;
}

void run_fig3(const Fig3Params& p, std::uint64_t seed, Context& ctx) {
  HoleStateParams hp;
  hp.sigma_p = p.sigma_p;
  hp.d = p.d;
  hp.alpha = cplx(std::sqrt(p.alpha_sq), 0.0);
  hp.box = p.box;
  hp.nodes = p.nodes;
  hp.k0 = p.k0;
  hp.n_modes = p.n_modes;
  hp.profile = p.profile;

  const auto state = ctx.stage("sigma_p, d, alpha_sq, nodes, box, k0, n_modes",
                               [&] { return normalize(make_hole_state(hp)); });
  ctx.info("modes = " + std::to_string(state.grid().size()));
  ctx.info("chi = " + exact(state.chi()));
  const double norm_err = std::abs(state.norm_squared() - 1.0);
  ctx.check("|<psi|psi> - 1| = " + num(norm_err) + " (limit 1e-6)", norm_err < 1e-6);

  const auto map = ctx.stage("dx_max, samples",
                             [&] { return correlation_scan(state, -p.dx_max, p.dx_max, p.samples); });
  const double center = 0.5 * p.box;

  const double g_min = *std::min_element(map.g2.begin(), map.g2.end());
  ctx.check("min G2 = " + num(g_min) + " (must be >= -1e-12)", g_min >= -1e-12);

  std::vector<double> plateau;
  if (p.profile == HoleProfile::smoothstep) {
    for (std::size_t i = 0; i < map.g2.size(); ++i) {
      if (std::abs(map.delta_x[i]) >= 4.0 * p.d) plateau.push_back(map.g2[i]);
    }
  } else {
    plateau = map.g2;
  }
  double plateau_mean = 0.0;
  for (double v : plateau) plateau_mean += v;
  plateau_mean /= static_cast<double>(plateau.size());
  ctx.info("plateau G2 = " + exact(plateau_mean));
  const double spread = plateau_spread(plateau);
  ctx.check("plateau spread = " + num(spread) + " (limit 0.02)", spread <= 0.02);

  if (p.profile == HoleProfile::smoothstep) {
    const double g0 = joint_detection(state, center, center);
    const double ratio = g0 / plateau_mean;
    ctx.check("G2(0) / plateau = " + num(ratio) + " (limit 1e-3)", ratio < 1e-3);
    const double bound = std::exp(-(p.d / p.sigma_p) * (p.d / p.sigma_p) / 8.0);
    ctx.check("G2(0) / plateau = " + num(ratio) + " (bound e^{-(d/sigma_p)^2/8} = " + num(bound) +
                  ")",
              ratio <= bound);
    const auto i_min = static_cast<std::size_t>(
        std::min_element(map.g2.begin(), map.g2.end()) - map.g2.begin());
    const double where = map.delta_x[i_min];
    ctx.check("argmin delta_x = " + num(where) + " (must satisfy |delta_x| < d/2)",
              std::abs(where) < 0.5 * p.d);
    if (6.0 * p.d <= p.dx_max) {
      const double gp = joint_detection(state, center + 3.0 * p.d, center - 3.0 * p.d);
      const double gm = joint_detection(state, center - 3.0 * p.d, center + 3.0 * p.d);
      const double asym = std::abs(gp - gm) / std::max(gp, gm);
      ctx.check("G2(+6d) vs G2(-6d) relative difference = " + num(asym) + " (limit 0.02)",
                asym <= 0.02);
    }
    try {
      const double width = dip_full_width(map);
      ctx.info("dip full width at half depth = " + exact(width) + " (" + num(width / p.d) +
               " d)");
    } catch (const std::exception& e) {
      ctx.info(std::string("dip full width unavailable: ") + e.what());
    }
  }

  std::vector<double> control_g2;
  if (p.control) {
    auto cp = hp;
    cp.profile = HoleProfile::flat;
    const auto control = ctx.stage("control", [&] { return normalize(make_hole_state(cp)); });
    const auto cmap = correlation_scan(control, -p.dx_max, p.dx_max, p.samples);
    control_g2 = cmap.g2;
    const double cs = plateau_spread(cmap.g2);
    ctx.check("control (f = 1) spread = " + num(cs) + " (limit 1e-8)", cs <= 1e-8);
  }

  if (p.mc_samples > 0) {
    const auto mc = ctx.stage("mc_samples, seed", [&] {
      return monte_carlo_norm(state.envelope(), p.alpha_sq, p.sigma_p, p.mc_samples, seed);
    });
    const double rel = std::abs(mc.chi / state.chi() - 1.0);
    ctx.info("Monte-Carlo chi = " + exact(mc.chi) + " from " + std::to_string(mc.samples) +
             " samples");
    ctx.check("|chi_MC / chi - 1| = " + num(rel) + " (limit " + num(p.mc_tolerance) + ")",
              rel <= p.mc_tolerance);
  }

  std::vector<std::string> header{"delta_x (length)", "g2 (arb. units)"};
  if (p.control) header.push_back("g2_control (arb. units)");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < map.g2.size(); ++i) {
    std::vector<double> row{map.delta_x[i], map.g2[i]};
    if (p.control) row.push_back(control_g2[i]);
    rows.push_back(std::move(row));
  }
  ctx.csv("fig3_scan.csv", header, rows);

  std::vector<PlotSeries> series;
  PlotSeries hole{"hole state", map.delta_x, {}};
  for (double g : map.g2) hole.y.push_back(g / plateau_mean);
  series.push_back(std::move(hole));
  if (p.control) {
    const double ref = control_g2.front();
    PlotSeries flat{"f = 1 control", map.delta_x, {}};
    for (double g : control_g2) flat.y.push_back(g / ref);
    series.push_back(std::move(flat));
  }
  ctx.svg("fig3_scan.svg", {"Joint detection across the photon hole", "delta_x", "G2 / plateau"},
          series);
}

void run_which_path(const WhichPathParams& p, Context& ctx) {
  const auto grid =
      ctx.stage("k0, sigma_p, n_modes", [&] { return make_mode_grid(p.k0, p.sigma_p, p.n_modes); });
  const double omega0 = p.omega0 > 0.0 ? p.omega0 : p.k0;
  const OscillatorBank bank{p.oscillator_positions, p.epsilon, omega0, false};
  const auto offsets = linspace(p.offset_min, p.offset_max, p.offset_count);
  const cplx alpha(std::sqrt(p.alpha_sq), 0.0);
  BranchOptions opts;
  opts.dt_factor = p.dt_factor;
  const std::string keys = "offset_min, offset_max, oscillator_positions, t_end, n_modes";

  struct Run {
    int id;
    std::string label;
    WhichPathReport report;
  };
  std::vector<Run> runs;
  runs.push_back({0, "epsilon", ctx.stage(keys, [&] {
                    return which_path_deviation(grid, p.sigma_p, bank, offsets, alpha, p.t_end, opts);
                  })});
  const auto& base = runs.back().report;
  ctx.check("max deviation = " + num(base.deviation) + " (threshold " + sci(p.threshold) + ")",
            base.deviation < p.threshold);
  ctx.info("max oscillator excitation |beta|^2 = " + num(base.max_excitation));
  double drift = base.max_relative_drift;

  if (p.convergence) {
    auto half = bank;
    half.epsilon = 0.5 * p.epsilon;
    runs.push_back({1, "epsilon/2", ctx.stage(keys, [&] {
                      return which_path_deviation(grid, p.sigma_p, half, offsets, alpha, p.t_end,
                                                  opts);
                    })});
    const double dev_half = runs.back().report.deviation;
    ctx.check("half-epsilon deviation = " + num(dev_half) + " (must be below " +
                  num(runs.front().report.deviation) + ")",
              dev_half < runs.front().report.deviation);
    ctx.info("deviation ratio full/half epsilon = " + num(runs.front().report.deviation / dev_half));
    drift = std::max(drift, runs.back().report.max_relative_drift);
  }
  if (p.contrast_detuning > 0.0) {
    auto detuned = bank;
    detuned.omega0 = omega0 + p.contrast_detuning;
    runs.push_back({2, "detuned", ctx.stage(keys + ", contrast_detuning", [&] {
                      return which_path_deviation(grid, p.sigma_p, detuned, offsets, alpha, p.t_end,
                                                  opts);
                    })});
    const double dev_det = runs.back().report.deviation;
    ctx.check("detuned-control deviation = " + num(dev_det) + " (must exceed 10 x threshold)",
              dev_det > 10.0 * p.threshold);
    drift = std::max(drift, runs.back().report.max_relative_drift);
  }
  ctx.check("conservation drift = " + num(drift) + " (limit 1e-8)", drift < 1e-8);

  std::vector<std::vector<double>> rows;
  std::vector<PlotSeries> series;
  for (const auto& run : runs) {
    const auto& branches = run.report.branches;
    PlotSeries s{run.label, {}, {}};
    for (const auto& b : branches) {
      double worst = 0.0;
      for (std::size_t i = 0; i < b.final_beta.size(); ++i) {
        const cplx ref = branches.front().final_beta[i];
        const double rel = std::abs(b.final_beta[i] - ref) / std::abs(ref);
        worst = std::max(worst, rel);
        rows.push_back({static_cast<double>(run.id), b.x1, static_cast<double>(i),
                        p.oscillator_positions[i], b.final_beta[i].real(),
                        b.final_beta[i].imag(), std::abs(b.final_beta[i]), rel});
      }
      s.x.push_back(b.x1);
      s.y.push_back(worst);
    }
    series.push_back(std::move(s));
  }
  ctx.csv("which_path.csv",
          {"run (0 base, 1 half epsilon, 2 detuned)", "x1 (length)", "oscillator",
           "position (length)", "beta_re", "beta_im", "beta_abs",
           "relative difference to first offset"},
          rows);
  PlotSpec spec{"Oscillator amplitude versus launch offset", "x1",
                "|beta(x1) - beta(x1_min)| / |beta|", false, true};
  ctx.svg("which_path.svg", spec, series);
}

void run_fock(const FockScenarioParams& p, Context& ctx) {
  const auto r = ctx.stage("alpha0, epsilon, omega0, t_end, truncation",
                           [&] { return fock_oracle(p.oracle); });
  const double floor = 1.0 - p.fidelity_tolerance;
  ctx.check("final fidelity = " + exact(r.fidelity) + " (must exceed 1 - " +
                num(p.fidelity_tolerance) + ")",
            r.fidelity > floor);
  ctx.check("minimum checkpoint fidelity = " + exact(r.min_fidelity) + " (must exceed 1 - " +
                num(p.fidelity_tolerance) + ")",
            r.min_fidelity > floor);
  ctx.info("max truncation-edge population = " + num(r.max_edge_population));
  ctx.info("final alpha = " + exact(r.alpha.real()) + " + " + exact(r.alpha.imag()) + "i");
  ctx.info("final beta = " + exact(r.beta.real()) + " + " + exact(r.beta.imag()) + "i");
  const double corrupted = product_state_fidelity(r.state, r.alpha, -r.beta);
  ctx.check("corrupted-amplitude fidelity = " + num(corrupted) + " (must be below " +
                num(p.control_threshold) + ")",
            corrupted < p.control_threshold);

  std::vector<std::vector<double>> rows;
  for (const auto& c : r.checkpoints) {
    rows.push_back({c.t, c.fidelity, c.edge_population, c.alpha.real(), c.alpha.imag(),
                    c.beta.real(), c.beta.imag()});
  }
  ctx.csv("fock_oracle.csv",
          {"t (time)", "fidelity", "edge_population", "alpha_re", "alpha_im", "beta_re",
           "beta_im"},
          rows);
}

void run_visibility(const VisibilityTableParams& p, Context& ctx) {
  std::vector<std::vector<double>> rows;
  std::vector<PlotSeries> series;
  bool monotone = true;
  for (double r : p.ratios) {
    PlotSeries s{"R = " + num(r), {}, {}};
    double prev = std::numeric_limits<double>::infinity();
    auto sorted = p.losses;
    std::sort(sorted.begin(), sorted.end());
    for (double n : sorted) {
      const DecoherenceModel m{1.0, r, static_cast<std::uint64_t>(n), p.c_i};
      const double v = ctx.stage("ratios, losses, c_i", [&] { return visibility_amplitude(m); });
      rows.push_back({r, n, v});
      if (v > prev) monotone = false;
      prev = v;
      s.x.push_back(n);
      s.y.push_back(v);
    }
    series.push_back(std::move(s));
    if (r == 1e-3 && std::find(p.losses.begin(), p.losses.end(), 1000.0) != p.losses.end()) {
      const double v = visibility_amplitude({1.0, r, 1000, p.c_i});
      const double err = std::abs(v - p.c_i * std::exp(-1.0));
      ctx.check("V(R = 1e-3, n_L = 1000) = " + exact(v) + " (expected c_i e^-1 within 1e-12)",
                err <= 1e-12);
    }
  }
  ctx.check(std::string("visibility non-increasing in n_L for every R = ") +
                (monotone ? "yes" : "no") + " (required)",
            monotone);

  const double bs = beamsplitter_visibility({cplx(std::sqrt(p.beamsplitter_n_bar), 0.0)});
  ctx.check("beam-splitter visibility at n_bar = " + num(p.beamsplitter_n_bar) + " = " + exact(bs) +
                " (expected e^-n_bar within 1e-12)",
            std::abs(bs - std::exp(-p.beamsplitter_n_bar)) <= 1e-12);

  bool contrast = true;
  for (double r : p.ratios) {
    if (r >= 1.0) continue;
    for (double n : {1.0, 10.0, 100.0}) {
      if (!(mechanism_contrast(n, r) > 1.0)) contrast = false;
    }
  }
  ctx.check(std::string("absorption visibility exceeds beam-splitter visibility for n in "
                        "{1, 10, 100} at every R < 1 = ") +
                (contrast ? "yes" : "no") + " (required)",
            contrast);

  ctx.csv("visibility_table.csv", {"R (delta_t / tau_D)", "n_lost (photons)", "visibility"}, rows);
  ctx.svg("visibility_table.svg",
          {"Visibility versus photons lost", "n_L", "visibility", true, false}, series);
}

void run_loss_budget(const LossBudgetParams& p, Context& ctx) {
  std::vector<std::vector<double>> rows;
  bool bracketed = true;
  for (double r : p.ratios) {
    for (double f : p.floors) {
      const auto n = ctx.stage("ratios, floors", [&] { return loss_budget(r, f); });
      const double at = loss_decay(static_cast<double>(n), r);
      const double next = loss_decay(static_cast<double>(n + 1), r);
      if (!(at >= f && next < f)) bracketed = false;
      rows.push_back({r, f, static_cast<double>(n), at, next});
      if (r == 1e-3 && f == std::exp(-1.0)) {
        ctx.check("loss_budget(R = 1e-3, floor = e^-1) = " + std::to_string(n) +
                      " (expected 1000)",
                  n == 1000);
      }
    }
  }
  ctx.check(std::string("e^{-n R} >= floor > e^{-(n+1) R} for every row = ") +
                (bracketed ? "yes" : "no") + " (required)",
            bracketed);
  ctx.csv("loss_budget.csv",
          {"R (delta_t / tau_D)", "visibility_floor", "n_max (photons)", "visibility_at_n_max",
           "visibility_at_n_max_plus_1"},
          rows);
}

void run_chain_scan(const ChainScanParams& p, Context& ctx) {
  const auto scan = ctx.stage("total_gain, n_amplifiers",
                              [&] { return noise_scaling_scan(p.total_gain, p.n_amplifiers); });
  std::vector<std::vector<double>> rows;
  double worst_amp = 0.0;
  PlotSeries noise{"added noise", {}, {}};
  PlotSeries limit{"ln g", {}, {}};
  for (const auto& row : scan.rows) {
    const auto chain = balanced_chain(p.total_gain, row.n_amplifiers);
    const double amp = run_chain(chain).final_amplitude_factor;
    worst_amp = std::max(worst_amp, std::abs(amp - 1.0));
    rows.push_back({static_cast<double>(row.n_amplifiers), row.added_noise, scan.limit, amp});
    noise.x.push_back(static_cast<double>(row.n_amplifiers));
    noise.y.push_back(row.added_noise);
    limit.x.push_back(static_cast<double>(row.n_amplifiers));
    limit.y.push_back(scan.limit);
  }
  ctx.check("balanced-chain |amplitude - 1| = " + num(worst_amp) + " (limit 1e-12)",
            worst_amp <= 1e-12);

  if (p.total_gain > 1.0) {
    ctx.check(std::string("added noise strictly decreasing in n_A = ") +
                  (scan.strictly_decreasing ? "yes" : "no") + " (required)",
              scan.strictly_decreasing);
    ctx.check(std::string("added noise above ln g for every n_A = ") +
                  (scan.above_limit ? "yes" : "no") + " (required)",
              scan.above_limit);
  } else {
    double worst = 0.0;
    for (const auto& row : scan.rows) worst = std::max(worst, std::abs(row.added_noise));
    ctx.check("added noise at g = 1 = " + num(worst) + " (expected 0)", worst == 0.0);
  }
  for (const auto& row : scan.rows) {
    if (row.n_amplifiers == 1) {
      const double err = std::abs(row.added_noise - (p.total_gain - 1.0));
      ctx.check("added noise at n_A = 1 = " + num(row.added_noise) + " (expected g - 1 = " +
                    num(p.total_gain - 1.0) + " within 1e-3)",
                err <= 1e-3);
    }
  }
  const auto& last = scan.rows.back();
  if (p.total_gain > 1.0 && last.n_amplifiers >= 100) {
    const double rel = (last.added_noise - scan.limit) / scan.limit;
    ctx.check("added noise at n_A = " + std::to_string(last.n_amplifiers) + " exceeds ln g by " +
                  num(rel) + " relative (limit 0.05)",
              rel <= 0.05);
  }

  ctx.csv("chain_scan.csv",
          {"n_amplifiers", "added_noise (photons)", "ln_g (photons)", "amplitude_factor"}, rows);
  ctx.svg("chain_scan.svg", {"Added spontaneous-emission noise", "n_A", "photons", true, false},
          {noise, limit});
}

void run_dispersion(const DispersionCheckParams& p, Context& ctx) {
  const auto grid =
      ctx.stage("k0, sigma_p, n_modes", [&] { return make_mode_grid(p.k0, p.sigma_p, p.n_modes); });
  const auto packet = ctx.stage("x1", [&] { return gaussian_coefficients(grid, p.x1, p.sigma_p); });
  const OscillatorBank bank{linspace(p.bank_start, p.bank_end, p.bank_count), p.epsilon, p.k0,
                            false};
  auto amp_bank = bank;
  amp_bank.inverted = true;
  const cplx alpha(std::sqrt(p.alpha_sq), 0.0);

  const auto residual = ctx.stage("bank_start, bank_end, bank_count, t", [&] {
    return dispersion_cancellation_modes(packet, bank, alpha, p.t);
  });
  std::vector<std::vector<double>> rows;
  PlotSeries loss{"absorber Re", {}, {}};
  PlotSeries gain{"amplifier Re", {}, {}};
  double worst = 0.0;
  double largest_drift = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double k = grid.k(i);
    const cplx a = field_drift_second_order(k, packet, bank, alpha, p.t);
    const cplx g = field_drift_second_order(k, packet, amp_bank, alpha, p.t);
    worst = std::max(worst, residual[i]);
    largest_drift = std::max(largest_drift, std::abs(a));
    rows.push_back({k, a.real(), a.imag(), g.real(), g.imag(), residual[i]});
    loss.x.push_back(k);
    loss.y.push_back(a.real());
    gain.x.push_back(k);
    gain.y.push_back(g.real());
  }
  ctx.info("largest single-medium drift = " + num(largest_drift));
  ctx.check("max per-mode cancellation residual = " + num(worst) + " (limit " + num(p.tolerance) +
                ")",
            worst < p.tolerance);
  ctx.check("largest single-medium drift = " + num(largest_drift) + " (must be nonzero)",
            largest_drift > 0.0);
  ctx.check("scalar tag loss 1 vs gain 1 = " + num(dispersion_cancellation(1.0, 1.0)) +
                " (expected 0)",
            dispersion_cancellation(1.0, 1.0) == 0.0);

  ctx.csv("dispersion_check.csv",
          {"k (1/length)", "absorber_drift_re", "absorber_drift_im", "amplifier_drift_re",
           "amplifier_drift_im", "residual"},
          rows);
  ctx.svg("dispersion_check.svg", {"Second-order field drift per mode", "k", "Re drift"},
          {loss, gain});
}

void write_summary(const std::filesystem::path& path, const Scenario& sc, const RunResult& r) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "experiment: " << experiment_name(sc.experiment) << '\n';
  out << "seed: " << sc.seed << '\n';
  for (const auto& line : r.info) out << line << '\n';
  for (const auto& c : r.checks) out << format_check(c) << '\n';
  out << "status: " << (r.passed() ? "PASS" : "FAIL") << '\n';
}

}  // namespace

RunError::RunError(std::string experiment, std::string keys, const std::string& message)
    : std::runtime_error(experiment + " [" + keys + "]: " + message), keys_(std::move(keys)) {}

bool RunResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckLine& c) { return c.passed; });
}

std::string format_check(const CheckLine& check) {
  return check.text + ": " + (check.passed ? "PASS" : "FAIL");
}

std::string tool_version() { return EPHSIM_VERSION; }

std::filesystem::path resolve_output_dir(const Scenario& scenario,
                                         const std::optional<std::string>& cli_out) {
  if (cli_out && !cli_out->empty()) return *cli_out;
  if (const char* env = std::getenv("EPHSIM_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  if (!scenario.output_dir.empty()) return scenario.output_dir;
  return "sim_out";
}

RunResult run_scenario(const Scenario& scenario, const std::filesystem::path& output_dir) {
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(output_dir);
  RunResult result;
  result.experiment = scenario.experiment;
  result.output_dir = output_dir;
  Context ctx{scenario.experiment, output_dir, result};

  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Fig3Params>) {
          run_fig3(p, scenario.seed, ctx);
        } else if constexpr (std::is_same_v<T, WhichPathParams>) {
          run_which_path(p, ctx);
        } else if constexpr (std::is_same_v<T, FockScenarioParams>) {
          run_fock(p, ctx);
        } else if constexpr (std::is_same_v<T, VisibilityTableParams>) {
          run_visibility(p, ctx);
        } else if constexpr (std::is_same_v<T, LossBudgetParams>) {
          run_loss_budget(p, ctx);
        } else if constexpr (std::is_same_v<T, ChainScanParams>) {
          run_chain_scan(p, ctx);
        } else {
          run_dispersion(p, ctx);
        }
      },
      scenario.params);

  write_summary(output_dir / "summary.txt", scenario, result);
  result.files.push_back("summary.txt");
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::vector<std::pair<std::string, std::string>> entries{
      {"experiment", std::string(experiment_name(scenario.experiment))},
      {"seed", std::to_string(scenario.seed)},
      {"tool_version", tool_version()},
      {"wall_time_s", num(result.wall_time_s)},
      {"status", result.passed() ? "PASS" : "FAIL"},
  };
  for (const auto& [k, v] : scenario.resolved) entries.emplace_back("param." + k, v);
  write_manifest(output_dir / "manifest.txt", entries, result.files);
  return result;
}

}  // namespace ephsim
