#include "ephsim/decoherence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ephsim {

double DecoherenceModel::ratio() const {
  if (!(tau_d > 0.0)) throw std::invalid_argument("decoherence: tau_D must be positive");
  if (!(delta_t >= 0.0)) throw std::invalid_argument("decoherence: delta_t must be >= 0");
  return delta_t / tau_d;
}

double loss_decay(double n_lost, double ratio) { return std::exp(-n_lost * ratio); }

double visibility_amplitude(const DecoherenceModel& model) {
  return model.c_i * loss_decay(static_cast<double>(model.n_lost), model.ratio());
}

std::uint64_t loss_budget(double ratio, double visibility_floor) {
  if (!(ratio > 0.0)) throw std::invalid_argument("loss_budget: R must be positive");
  if (!(visibility_floor > 0.0 && visibility_floor < 1.0)) {
    throw std::invalid_argument("loss_budget: visibility floor must lie in (0, 1)");
  }
  const double estimate = std::floor(-std::log(visibility_floor) / ratio);
  auto n = static_cast<std::uint64_t>(std::max(estimate, 0.0));
  // The closed form can land one off when -ln(floor)/R is an integer in exact arithmetic.
  while (n > 0 && loss_decay(static_cast<double>(n), ratio) < visibility_floor) --n;
  while (loss_decay(static_cast<double>(n + 1), ratio) >= visibility_floor) ++n;
  return n;
}

double excited_atom_overlap(double delta_t, double tau_d) {
  if (!(tau_d > 0.0)) throw std::invalid_argument("excited_atom_overlap: tau_D must be positive");
  return std::exp(-delta_t / (2.0 * tau_d));
}

cplx atomic_inner_product(std::span<const cplx> per_atom_overlaps) {
  cplx product = 1.0;
  for (std::size_t i = 0; i < per_atom_overlaps.size(); ++i) {
    const double m = std::abs(per_atom_overlaps[i]);
    if (m > 1.0 + 1e-12) {
      throw std::invalid_argument("atomic_inner_product: |overlap| = " + std::to_string(m) +
                                  " > 1 for atom " + std::to_string(i));
    }
    product *= per_atom_overlaps[i];
  }
  return product;
}

cplx oscillator_overlap(cplx beta_a, cplx beta_b) {
  return std::exp(-0.5 * std::norm(beta_a) - 0.5 * std::norm(beta_b) +
                  std::conj(beta_a) * beta_b);
}

double beamsplitter_visibility(const BeamSplitterTap& tap) { return std::exp(-tap.n_bar()); }

double mechanism_contrast(double n, double ratio) {
  return loss_decay(n, ratio) / std::exp(-n);
}

}  // namespace ephsim
