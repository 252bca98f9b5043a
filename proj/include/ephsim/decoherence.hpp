#pragma once

#include <cstdint>
#include <span>

#include "ephsim/wavepacket.hpp"

namespace ephsim {

/// Interferometer imbalance versus atomic coherence time.
struct DecoherenceModel {
  double tau_d = 1.0;
  double delta_t = 0.0;
  std::uint64_t n_lost = 0;
  double c_i = 1.0;

  /// R = delta_t / tau_d. Throws std::invalid_argument on an invalid model.
  double ratio() const;
};

struct BeamSplitterTap {
  cplx alpha_s;
  double n_bar() const { return std::norm(alpha_s); }
};

/// e^{-n R}: shared by the visibility and the loss budget so both agree bit for bit.
double loss_decay(double n_lost, double ratio);

/// c_i e^{-n_L delta_t / tau_D}
double visibility_amplitude(const DecoherenceModel& model);

/// Largest n_L with e^{-n_L R} >= visibility_floor.
std::uint64_t loss_budget(double ratio, double visibility_floor);

/// Surviving-amplitude overlap of one excited atom over delta_t: e^{-delta_t / 2 tau_D}.
double excited_atom_overlap(double delta_t, double tau_d);

/// prod_i <psi_i(t + dt)|psi_i(t)>. Throws std::invalid_argument if any |factor| > 1.
cplx atomic_inner_product(std::span<const cplx> per_atom_overlaps);

/// <beta_a|beta_b> for single-mode coherent states.
cplx oscillator_overlap(cplx beta_a, cplx beta_b);

/// e^{-n_bar_s}
double beamsplitter_visibility(const BeamSplitterTap& tap);

/// Ratio of absorption visibility e^{-nR} to beam-splitter visibility e^{-n}
/// for the same number n of photons removed.
double mechanism_contrast(double n, double ratio);

}  // namespace ephsim
