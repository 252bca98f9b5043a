#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ephsim/wavepacket.hpp"

namespace ephsim {

/// Oscillators standing in for the atoms of an absorbing or inverted medium.
/// Every mode couples to every oscillator with the same real matrix element.
struct OscillatorBank {
  std::vector<double> positions;
  double epsilon = 0.0;
  double omega0 = 0.0;
  bool inverted = false;
};

/// Coherent amplitudes of one branch. For an inverted bank `beta` holds the
/// amplitude of the raising operator, which is what drives field growth.
struct DynamicState {
  std::vector<cplx> alpha;
  std::vector<cplx> beta;
  double t = 0.0;
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear field/oscillator system with mode frequencies equal to their wave numbers.
class CoupledMedium {
 public:
  CoupledMedium(std::span<const double> k_values, const OscillatorBank& bank);

  std::size_t n_modes() const { return k_.size(); }
  std::size_t n_oscillators() const { return bank_.positions.size(); }
  const OscillatorBank& bank() const { return bank_; }
  double max_frequency() const;

  /// Writes d/dt of `state` into `out` (sizes must already match).
  void derivative(const DynamicState& state, DynamicState& out) const;

  /// sum|alpha|^2 + sum|beta|^2 for absorbers, sum|alpha|^2 - sum|beta|^2 for amplifiers.
  double conserved_quantity(const DynamicState& state) const;

  /// Field seen by oscillator i: sum_k e^{ikx_i} alpha_k.
  cplx local_field(const DynamicState& state, std::size_t i) const;

 private:
  std::vector<double> k_;
  OscillatorBank bank_;
  std::vector<cplx> phase_;  // e^{i k x_i}, row-major [oscillator][mode]
};

/// Derivatives of the absorbing medium; throws std::invalid_argument for an inverted bank.
DynamicState absorber_rhs(const DynamicState& state, const OscillatorBank& bank,
                          const ModeGrid& grid);
/// Mean-field derivatives of the inverted medium (noise operator dropped).
DynamicState amplifier_rhs(const DynamicState& state, const OscillatorBank& bank,
                           const ModeGrid& grid);

struct IntegrateOptions {
  /// Store every n-th step in the trajectory (0: endpoints only).
  std::size_t sample_every = 0;
};

struct Trajectory {
  std::vector<DynamicState> samples;
  DynamicState final_state;
  std::size_t steps = 0;
  /// max_t |Q(t) - Q(0)| / (sum|alpha|^2 + sum|beta|^2 at t = 0)
  double max_relative_drift = 0.0;
};

/// Fixed-step classical fourth-order Runge-Kutta from initial.t to t_end.
/// Requires dt <= 0.05 / max_frequency; aborts with IntegrationError on NaN/overflow.
Trajectory integrate(const CoupledMedium& medium, const DynamicState& initial, double t_end,
                     double dt, const IntegrateOptions& options = {});

/// Gaussian cumulative distribution with unit width.
double normal_cdf(double z);

/// Fraction of the packet launched at x1 that has passed x_i by time t.
double passage_fraction(double t, double x_i, double x1, double sigma_p);

/// Resonant first-order oscillator amplitude while the packet passes (uses F).
cplx analytic_beta(const WavePacket& packet, double x_i, cplx alpha, double epsilon, double t);
/// Final first-order amplitude (eps alpha c0 / i) sqrt(2 pi) sigma e^{ik0 x_i} e^{-i w0 t}.
/// Throws std::domain_error unless the packet has passed x_i (F > 1 - 1e-8).
cplx analytic_beta_final(const WavePacket& packet, double x_i, cplx alpha, double epsilon,
                         double t);

/// Inverted-oscillator raising amplitude while the packet passes; the negative
/// of analytic_beta at matched arguments. This is the mean-field solution.
cplx analytic_bdagger(const WavePacket& packet, double x_i, cplx alpha, double epsilon, double t);
/// Final raising amplitude in the conjugate-phase form (eps alpha c0 / i) sqrt(2 pi) sigma
/// e^{-ik0 x_i} e^{+i w0 t}. Same magnitude as analytic_beta_final.
cplx analytic_bdagger_final(const WavePacket& packet, double x_i, cplx alpha, double epsilon,
                            double t);

/// Second-order field drive on mode k from the first-order oscillator amplitudes:
/// -/+ alpha eps^2 sqrt(2 pi) c0 sigma sum_i e^{i(k0-k)x_i} e^{-i w0 t} F, minus for
/// absorbers, plus for inverted banks.
cplx field_drift_second_order(double k, const WavePacket& packet, const OscillatorBank& bank,
                              cplx alpha, double t);

/// Oscillators evenly spaced over [x_start, x_end] with epsilon chosen so the
/// first-order photon transfer removes (or adds) `total_fraction` of the packet.
OscillatorBank make_uniform_bank(double x_start, double x_end, std::size_t count,
                                 double total_fraction, const WavePacket& packet,
                                 bool inverted);

struct BranchResult {
  double x1 = 0.0;
  std::vector<cplx> final_alpha;
  std::vector<cplx> final_beta;
  std::vector<DynamicState> trajectory;
  double max_relative_drift = 0.0;
};

struct BranchOptions {
  /// Step size as a fraction of 1 / max_frequency.
  double dt_factor = 0.01;
  std::size_t sample_every = 0;
};

/// Integrates one packet launched at x1 (all oscillators start in their ground state).
BranchResult run_branch(const ModeGrid& grid, double sigma_p, double x1, cplx alpha,
                        const OscillatorBank& bank, double t_end,
                        const BranchOptions& options = {});

struct WhichPathReport {
  double deviation = 0.0;
  std::vector<BranchResult> branches;
  double max_relative_drift = 0.0;
  double max_excitation = 0.0;  ///< max_i |beta_i|^2 over branches
};

/// Runs one branch per offset and returns
/// max_{i,a,b} |beta_i^(a) - beta_i^(b)| / max|beta_i|.
/// Throws std::invalid_argument if a packet is not launched upstream of every
/// oscillator, does not fully pass by t_end, or meets its own ring image.
WhichPathReport which_path_deviation(const ModeGrid& grid, double sigma_p,
                                     const OscillatorBank& bank,
                                     std::span<const double> x1_offsets, cplx alpha,
                                     double t_end, const BranchOptions& options = {});

}  // namespace ephsim
