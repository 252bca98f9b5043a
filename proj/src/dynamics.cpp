#include "ephsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ephsim {

namespace {

constexpr cplx kI(0.0, 1.0);
constexpr double kFullPass = 1.0 - 1e-8;
constexpr double kNotStarted = 1e-8;
constexpr double kPerturbativeExcitation = 0.01;

void axpy(std::vector<cplx>& out, const std::vector<cplx>& x, double h,
          const std::vector<cplx>& dx) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + h * dx[i];
}

double total_population(const DynamicState& s) {
  double acc = 0.0;
  for (const auto& a : s.alpha) acc += std::norm(a);
  for (const auto& b : s.beta) acc += std::norm(b);
  return acc;
}

void check_finite(const DynamicState& s) {
  for (std::size_t k = 0; k < s.alpha.size(); ++k) {
    if (!std::isfinite(s.alpha[k].real()) || !std::isfinite(s.alpha[k].imag())) {
      throw IntegrationError("integrate: non-finite field amplitude in mode " +
                             std::to_string(k) + " at t = " + std::to_string(s.t));
    }
  }
  for (std::size_t i = 0; i < s.beta.size(); ++i) {
    if (!std::isfinite(s.beta[i].real()) || !std::isfinite(s.beta[i].imag())) {
      throw IntegrationError("integrate: non-finite oscillator amplitude " + std::to_string(i) +
                             " at t = " + std::to_string(s.t));
    }
  }
}

cplx first_order_prefactor(const WavePacket& packet, cplx alpha, double epsilon) {
  return epsilon * alpha * packet.c0 / kI * std::sqrt(2.0 * kPi) * packet.sigma_p;
}

}  // namespace

CoupledMedium::CoupledMedium(std::span<const double> k_values, const OscillatorBank& bank)
    : k_(k_values.begin(), k_values.end()), bank_(bank) {
  phase_.resize(bank_.positions.size() * k_.size());
  for (std::size_t i = 0; i < bank_.positions.size(); ++i) {
    for (std::size_t k = 0; k < k_.size(); ++k) {
      phase_[i * k_.size() + k] = std::polar(1.0, k_[k] * bank_.positions[i]);
    }
  }
}

double CoupledMedium::max_frequency() const {
  double w = std::abs(bank_.omega0);
  for (double k : k_) w = std::max(w, std::abs(k));
  return w;
}

cplx CoupledMedium::local_field(const DynamicState& state, std::size_t i) const {
  const cplx* row = phase_.data() + i * k_.size();
  cplx acc = 0.0;
  for (std::size_t k = 0; k < k_.size(); ++k) acc += row[k] * state.alpha[k];
  return acc;
}

void CoupledMedium::derivative(const DynamicState& state, DynamicState& out) const {
  const double eps = bank_.epsilon;
  const double sign = bank_.inverted ? 1.0 : -1.0;
  for (std::size_t k = 0; k < k_.size(); ++k) out.alpha[k] = -kI * k_[k] * state.alpha[k];
  for (std::size_t i = 0; i < bank_.positions.size(); ++i) {
    const cplx* row = phase_.data() + i * k_.size();
    cplx field = 0.0;
    for (std::size_t k = 0; k < k_.size(); ++k) field += row[k] * state.alpha[k];
    out.beta[i] = -kI * bank_.omega0 * state.beta[i] + sign * kI * eps * field;
    const cplx drive = -kI * eps * state.beta[i];
    for (std::size_t k = 0; k < k_.size(); ++k) out.alpha[k] += std::conj(row[k]) * drive;
  }
  out.t = 1.0;
}

double CoupledMedium::conserved_quantity(const DynamicState& state) const {
  double field = 0.0;
  for (const auto& a : state.alpha) field += std::norm(a);
  double osc = 0.0;
  for (const auto& b : state.beta) osc += std::norm(b);
  return bank_.inverted ? field - osc : field + osc;
}

namespace {

DynamicState rhs_for(const DynamicState& state, const OscillatorBank& bank,
                     const ModeGrid& grid) {
  if (state.alpha.size() != grid.size() || state.beta.size() != bank.positions.size()) {
    throw std::invalid_argument("rhs: state does not match grid/bank sizes");
  }
  const CoupledMedium medium(grid.k_values(), bank);
  DynamicState out{std::vector<cplx>(grid.size()), std::vector<cplx>(bank.positions.size()),
                   0.0};
  medium.derivative(state, out);
  return out;
}

}  // namespace

DynamicState absorber_rhs(const DynamicState& state, const OscillatorBank& bank,
                          const ModeGrid& grid) {
  if (bank.inverted) throw std::invalid_argument("absorber_rhs: bank is inverted");
  return rhs_for(state, bank, grid);
}

DynamicState amplifier_rhs(const DynamicState& state, const OscillatorBank& bank,
                           const ModeGrid& grid) {
  if (!bank.inverted) throw std::invalid_argument("amplifier_rhs: bank is not inverted");
  return rhs_for(state, bank, grid);
}

Trajectory integrate(const CoupledMedium& medium, const DynamicState& initial, double t_end,
                     double dt, const IntegrateOptions& options) {
  if (initial.alpha.size() != medium.n_modes() ||
      initial.beta.size() != medium.n_oscillators()) {
    throw std::invalid_argument("integrate: state does not match the medium");
  }
  const double w_max = medium.max_frequency();
  if (!(dt > 0.0) || (w_max > 0.0 && dt > 0.05 / w_max * (1.0 + 1e-12))) {
    throw std::invalid_argument("integrate: dt = " + std::to_string(dt) +
                                " must satisfy 0 < dt <= 0.05 / max frequency");
  }
  if (t_end < initial.t) throw std::invalid_argument("integrate: t_end precedes initial time");

  const auto steps = static_cast<std::size_t>(std::ceil((t_end - initial.t) / dt - 1e-9));
  const double h = steps > 0 ? (t_end - initial.t) / static_cast<double>(steps) : 0.0;

  Trajectory traj;
  traj.steps = steps;
  DynamicState y = initial;
  const double q0 = medium.conserved_quantity(y);
  const double scale = std::max(total_population(y), std::numeric_limits<double>::min());
  if (options.sample_every > 0) traj.samples.push_back(y);

  const std::size_t nm = medium.n_modes();
  const std::size_t no = medium.n_oscillators();
  auto blank = [&] {
    return DynamicState{std::vector<cplx>(nm), std::vector<cplx>(no), 0.0};
  };
  DynamicState k1 = blank(), k2 = blank(), k3 = blank(), k4 = blank(), tmp = blank();

  for (std::size_t n = 0; n < steps; ++n) {
    medium.derivative(y, k1);
    axpy(tmp.alpha, y.alpha, 0.5 * h, k1.alpha);
    axpy(tmp.beta, y.beta, 0.5 * h, k1.beta);
    medium.derivative(tmp, k2);
    axpy(tmp.alpha, y.alpha, 0.5 * h, k2.alpha);
    axpy(tmp.beta, y.beta, 0.5 * h, k2.beta);
    medium.derivative(tmp, k3);
    axpy(tmp.alpha, y.alpha, h, k3.alpha);
    axpy(tmp.beta, y.beta, h, k3.beta);
    medium.derivative(tmp, k4);
    for (std::size_t k = 0; k < nm; ++k) {
      y.alpha[k] += h / 6.0 * (k1.alpha[k] + 2.0 * k2.alpha[k] + 2.0 * k3.alpha[k] + k4.alpha[k]);
    }
    for (std::size_t i = 0; i < no; ++i) {
      y.beta[i] += h / 6.0 * (k1.beta[i] + 2.0 * k2.beta[i] + 2.0 * k3.beta[i] + k4.beta[i]);
    }
    y.t = initial.t + h * static_cast<double>(n + 1);

    const double drift = std::abs(medium.conserved_quantity(y) - q0) / scale;
    if (!std::isfinite(drift)) check_finite(y);
    traj.max_relative_drift = std::max(traj.max_relative_drift, drift);
    if (options.sample_every > 0 && (n + 1) % options.sample_every == 0) traj.samples.push_back(y);
  }
  check_finite(y);
  y.t = t_end;
  traj.final_state = std::move(y);
  return traj;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double passage_fraction(double t, double x_i, double x1, double sigma_p) {
  return normal_cdf((t - (x_i - x1)) / sigma_p);
}

cplx analytic_beta(const WavePacket& packet, double x_i, cplx alpha, double epsilon, double t) {
  const double k0 = packet.grid.k0();
  return first_order_prefactor(packet, alpha, epsilon) * std::polar(1.0, k0 * x_i - k0 * t) *
         passage_fraction(t, x_i, packet.center, packet.sigma_p);
}

cplx analytic_beta_final(const WavePacket& packet, double x_i, cplx alpha, double epsilon,
                         double t) {
  const double f = passage_fraction(t, x_i, packet.center, packet.sigma_p);
  if (f <= kFullPass) {
    throw std::domain_error("analytic_beta_final: packet has not passed x_i (F = " +
                            std::to_string(f) + ")");
  }
  const double k0 = packet.grid.k0();
  return first_order_prefactor(packet, alpha, epsilon) * std::polar(1.0, k0 * x_i - k0 * t);
}

cplx analytic_bdagger(const WavePacket& packet, double x_i, cplx alpha, double epsilon,
                      double t) {
  return -analytic_beta(packet, x_i, alpha, epsilon, t);
}

cplx analytic_bdagger_final(const WavePacket& packet, double x_i, cplx alpha, double epsilon,
                            double t) {
  const double f = passage_fraction(t, x_i, packet.center, packet.sigma_p);
  if (f <= kFullPass) {
    throw std::domain_error("analytic_bdagger_final: packet has not passed x_i (F = " +
                            std::to_string(f) + ")");
  }
  const double k0 = packet.grid.k0();
  return first_order_prefactor(packet, alpha, epsilon) * std::polar(1.0, -k0 * x_i + k0 * t);
}

cplx field_drift_second_order(double k, const WavePacket& packet, const OscillatorBank& bank,
                              cplx alpha, double t) {
  const double k0 = packet.grid.k0();
  const double eps = bank.epsilon;
  const cplx prefactor =
      alpha * eps * eps * std::sqrt(2.0 * kPi) * packet.c0 * packet.sigma_p *
      std::polar(1.0, -bank.omega0 * t);
  cplx sum = 0.0;
  for (double x_i : bank.positions) {
    sum += std::polar(1.0, (k0 - k) * x_i) * passage_fraction(t, x_i, packet.center, packet.sigma_p);
  }
  return (bank.inverted ? 1.0 : -1.0) * prefactor * sum;
}

OscillatorBank make_uniform_bank(double x_start, double x_end, std::size_t count,
                                 double total_fraction, const WavePacket& packet,
                                 bool inverted) {
  if (count == 0) throw std::invalid_argument("make_uniform_bank: need at least one oscillator");
  if (!(total_fraction >= 0.0)) {
    throw std::invalid_argument("make_uniform_bank: total fraction must be non-negative");
  }
  OscillatorBank bank;
  bank.inverted = inverted;
  bank.omega0 = packet.grid.k0();
  bank.positions.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    bank.positions[i] =
        count == 1 ? 0.5 * (x_start + x_end)
                   : x_start + (x_end - x_start) * static_cast<double>(i) /
                                   static_cast<double>(count - 1);
  }
  // |beta_final|^2 / |alpha|^2 = 2 pi eps^2 |c0|^2 sigma^2 per oscillator
  const double per_eps_sq =
      2.0 * kPi * std::norm(packet.c0) * packet.sigma_p * packet.sigma_p;
  bank.epsilon = std::sqrt(total_fraction / (static_cast<double>(count) * per_eps_sq));
  return bank;
}

BranchResult run_branch(const ModeGrid& grid, double sigma_p, double x1, cplx alpha,
                        const OscillatorBank& bank, double t_end, const BranchOptions& options) {
  const auto packet = gaussian_coefficients(grid, x1, sigma_p);
  const CoupledMedium medium(grid.k_values(), bank);
  DynamicState init;
  init.alpha.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) init.alpha[k] = alpha * packet.coeffs[k];
  init.beta.assign(bank.positions.size(), cplx(0.0, 0.0));

  const double dt = options.dt_factor / medium.max_frequency();
  auto traj = integrate(medium, init, t_end, dt, IntegrateOptions{options.sample_every});

  BranchResult r;
  r.x1 = x1;
  r.final_alpha = traj.final_state.alpha;
  r.final_beta = traj.final_state.beta;
  r.trajectory = std::move(traj.samples);
  r.max_relative_drift = traj.max_relative_drift;
  return r;
}

WhichPathReport which_path_deviation(const ModeGrid& grid, double sigma_p,
                                     const OscillatorBank& bank,
                                     std::span<const double> x1_offsets, cplx alpha,
                                     double t_end, const BranchOptions& options) {
  if (x1_offsets.empty()) throw std::invalid_argument("which_path_deviation: no offsets");
  if (bank.positions.empty()) throw std::invalid_argument("which_path_deviation: empty bank");
  const double ring = grid.ring_length();
  for (double x1 : x1_offsets) {
    for (double x_i : bank.positions) {
      if (passage_fraction(0.0, x_i, x1, sigma_p) > kNotStarted) {
        throw std::invalid_argument("which_path_deviation: packet at x1 = " + std::to_string(x1) +
                                    " already overlaps oscillator at " + std::to_string(x_i));
      }
      if (passage_fraction(t_end, x_i, x1, sigma_p) <= kFullPass) {
        throw std::invalid_argument("which_path_deviation: packet at x1 = " + std::to_string(x1) +
                                    " has not passed oscillator at " + std::to_string(x_i) +
                                    " by t_end");
      }
      if (passage_fraction(t_end, x_i + ring, x1, sigma_p) > kNotStarted) {
        throw std::invalid_argument(
            "which_path_deviation: ring image of packet at x1 = " + std::to_string(x1) +
            " reaches oscillator at " + std::to_string(x_i) + " (increase n_modes)");
      }
    }
  }

  WhichPathReport report;
  for (double x1 : x1_offsets) {
    report.branches.push_back(run_branch(grid, sigma_p, x1, alpha, bank, t_end, options));
  }

  double max_beta = 0.0;
  double max_diff = 0.0;
  for (const auto& br : report.branches) {
    report.max_relative_drift = std::max(report.max_relative_drift, br.max_relative_drift);
    for (const auto& b : br.final_beta) {
      max_beta = std::max(max_beta, std::abs(b));
      report.max_excitation = std::max(report.max_excitation, std::norm(b));
    }
  }
  if (report.max_excitation >= kPerturbativeExcitation) {
    throw std::invalid_argument("which_path_deviation: oscillator excitation |beta|^2 = " +
                                std::to_string(report.max_excitation) +
                                " leaves the perturbative regime (< 0.01); reduce epsilon");
  }
  for (std::size_t a = 0; a < report.branches.size(); ++a) {
    for (std::size_t b = a + 1; b < report.branches.size(); ++b) {
      for (std::size_t i = 0; i < bank.positions.size(); ++i) {
        max_diff = std::max(max_diff, std::abs(report.branches[a].final_beta[i] -
                                               report.branches[b].final_beta[i]));
      }
    }
  }
  report.deviation = max_beta > 0.0 ? max_diff / max_beta : 0.0;
  return report;
}

}  // namespace ephsim
