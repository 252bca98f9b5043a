#include "ephsim/wavepacket.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ephsim {

namespace {
constexpr double kSpanSigmas = 8.0;
}

ModeGrid make_mode_grid(double k0, double sigma_p, std::size_t n_modes) {
  if (n_modes < 16) {
    throw std::invalid_argument("make_mode_grid: n_modes must be >= 16, got " +
                                std::to_string(n_modes));
  }
  if (!(k0 > 0.0) || !(sigma_p > 0.0)) {
    throw std::invalid_argument("make_mode_grid: k0 and sigma_p must be positive");
  }
  const double half_span = kSpanSigmas / sigma_p;
  if (k0 - half_span <= 0.0) {
    throw std::invalid_argument(
        "make_mode_grid: packet too broadband for carrier, grid would contain "
        "non-positive wave numbers (k0 - 8/sigma_p = " +
        std::to_string(k0 - half_span) + ")");
  }
  const double delta_k = 2.0 * half_span / static_cast<double>(n_modes - 1);
  const auto mid = static_cast<double>(n_modes - 1) / 2.0;
  std::vector<double> k(n_modes);
  for (std::size_t i = 0; i < n_modes; ++i) {
    k[i] = k0 + (static_cast<double>(i) - mid) * delta_k;
  }
  return ModeGrid(std::move(k), delta_k, k0);
}

WavePacket gaussian_coefficients(const ModeGrid& grid, double x1, double sigma_p) {
  if (!(sigma_p > 0.0)) {
    throw std::invalid_argument("gaussian_coefficients: sigma_p must be positive");
  }
  const double half_span = 0.5 * (grid.k_max() - grid.k_min());
  if (half_span * sigma_p < kSpanSigmas * (1.0 - 1e-12)) {
    throw std::invalid_argument(
        "gaussian_coefficients: grid does not cover k0 +/- 8/sigma_p");
  }

  std::vector<double> gauss(grid.size());
  double norm_sq = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double q = grid.k(i) - grid.k0();
    gauss[i] = std::exp(-0.5 * sigma_p * sigma_p * q * q);
    norm_sq += gauss[i] * gauss[i];
    sum += gauss[i];
  }
  const double scale = 1.0 / std::sqrt(norm_sq);

  std::vector<cplx> coeffs(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double q = grid.k(i) - grid.k0();
    coeffs[i] = scale * gauss[i] * std::polar(1.0, -q * x1);
  }
  return WavePacket{grid, x1, sigma_p, cplx(scale * sum, 0.0), std::move(coeffs)};
}

cplx packet_envelope(const WavePacket& packet, double x) {
  const double offset = x - packet.center;
  if (std::abs(offset) > packet.grid.window_half_width()) {
    throw std::domain_error("packet_envelope: |x - center| = " +
                            std::to_string(std::abs(offset)) +
                            " exceeds the alias-free window " +
                            std::to_string(packet.grid.window_half_width()));
  }
  // Factor out the carrier so the summed phases stay small.
  cplx acc = 0.0;
  for (std::size_t i = 0; i < packet.grid.size(); ++i) {
    const double q = packet.grid.k(i) - packet.grid.k0();
    acc += packet.coeffs[i] * std::polar(1.0, q * x);
  }
  return acc * std::polar(1.0, packet.grid.k0() * x);
}

cplx mode_overlap(const WavePacket& a, const WavePacket& b) {
  if (a.coeffs.size() != b.coeffs.size()) {
    throw std::invalid_argument("mode_overlap: packets live on different grids");
  }
  cplx acc = 0.0;
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
    acc += std::conj(a.coeffs[i]) * b.coeffs[i];
  }
  return acc;
}

}  // namespace ephsim
