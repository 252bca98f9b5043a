#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ephsim {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Uniform grid of plane-wave wave numbers centred on the carrier k0.
///
/// Natural units are used throughout (hbar = c = 1), so a mode's angular
/// frequency equals its wave number.
class ModeGrid {
 public:
  double k0() const { return k0_; }
  double delta_k() const { return delta_k_; }
  std::size_t size() const { return k_.size(); }
  std::span<const double> k_values() const { return k_; }
  double k(std::size_t i) const { return k_[i]; }
  double k_min() const { return k_.front(); }
  double k_max() const { return k_.back(); }

  /// Largest |x - center| at which a mode sum is free of aliasing.
  double window_half_width() const { return kPi / delta_k_; }
  /// Period of the discrete mode sums in x (the field lives on a ring).
  double ring_length() const { return 2.0 * kPi / delta_k_; }

 private:
  friend ModeGrid make_mode_grid(double k0, double sigma_p, std::size_t n_modes);
  ModeGrid(std::vector<double> k, double delta_k, double k0)
      : k_(std::move(k)), delta_k_(delta_k), k0_(k0) {}

  std::vector<double> k_;
  double delta_k_;
  double k0_;
};

/// Grid spanning k0 +/- 8/sigma_p with n_modes points.
/// Throws std::invalid_argument on bad sizes or when any k would be <= 0.
ModeGrid make_mode_grid(double k0, double sigma_p, std::size_t n_modes);

/// Gaussian single-photon packet: sum_k c_k e^{ikx} = c0 e^{i k0 x} e^{-(x-x1)^2/2 sigma^2}.
struct WavePacket {
  ModeGrid grid;
  double center;
  double sigma_p;
  cplx c0;
  std::vector<cplx> coeffs;
};

/// c_k(x1) ~ e^{-i(k-k0)x1} e^{-sigma^2 (k-k0)^2 / 2}, scaled to sum |c_k|^2 = 1.
WavePacket gaussian_coefficients(const ModeGrid& grid, double x1, double sigma_p);

/// sum_k c_k e^{ikx}. Throws std::domain_error outside the alias-free window.
cplx packet_envelope(const WavePacket& packet, double x);

/// sum_k conj(a_k) b_k for two packets on the same grid.
cplx mode_overlap(const WavePacket& a, const WavePacket& b);

}  // namespace ephsim
