// Independent reference calculations used only by the tests. None of these
// call into the library's numerics; they work from closed forms or brute force.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
constexpr double pi = 3.14159265358979323846;

// Continuum overlap of two unit Gaussian packets a distance delta apart.
inline double gaussian_overlap(double delta, double sigma) {
  return std::exp(-delta * delta / (4.0 * sigma * sigma));
}

// <alpha(a)|alpha(b)> for continuum packets.
inline double coherent_kernel(double alpha_sq, double delta, double sigma) {
  return std::exp(alpha_sq * (gaussian_overlap(delta, sigma) - 1.0));
}

// Plain four-fold sum of f f' K K over the node grid with the given weights.
inline double brute_force_norm(const std::function<double(double, double)>& f,
                               const std::vector<double>& x, const std::vector<double>& w,
                               double alpha_sq, double sigma) {
  double acc = 0.0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double fij = w[i] * w[j] * f(x[i], x[j]);
      if (fij == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          acc += fij * w[k] * w[l] * f(x[k], x[l]) *
                 coherent_kernel(alpha_sq, x[i] - x[k], sigma) *
                 coherent_kernel(alpha_sq, x[j] - x[l], sigma);
        }
    }
  return acc;
}

// G2 by brute force: chi^2 |alpha|^4 sum f f' g(xa-x1) g(xa-x1') g(xb-x2) g(xb-x2') K K,
// with g the real Gaussian envelope scaled by |c0| (the common carrier cancels).
inline double brute_force_g2(const std::function<double(double, double)>& f,
                             const std::vector<double>& x, const std::vector<double>& w,
                             double alpha_sq, double sigma, double c0_abs, double chi,
                             double xa, double xb) {
  auto g = [&](double u) { return c0_abs * std::exp(-u * u / (2.0 * sigma * sigma)); };
  double acc = 0.0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double a = w[i] * w[j] * f(x[i], x[j]) * g(xa - x[i]) * g(xb - x[j]);
      if (a == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          acc += a * w[k] * w[l] * f(x[k], x[l]) * g(xa - x[k]) * g(xb - x[l]) *
                 coherent_kernel(alpha_sq, x[i] - x[k], sigma) *
                 coherent_kernel(alpha_sq, x[j] - x[l], sigma);
        }
    }
  return chi * chi * alpha_sq * alpha_sq * acc;
}

// One resonant mode and one oscillator, coupling eps, field starting at a0.
struct TwoMode {
  cplx alpha;
  cplx beta;
};

inline TwoMode rabi_absorber(cplx a0, double eps, double omega, double t) {
  const cplx rot = std::polar(1.0, -omega * t);
  return {a0 * std::cos(eps * t) * rot, cplx(0.0, -1.0) * a0 * std::sin(eps * t) * rot};
}

// Inverted oscillator (beta is the raising amplitude): hyperbolic growth.
inline TwoMode hyperbolic_amplifier(cplx a0, double eps, double omega, double t) {
  const cplx rot = std::polar(1.0, -omega * t);
  return {a0 * std::cosh(eps * t) * rot, cplx(0.0, 1.0) * a0 * std::sinh(eps * t) * rot};
}

// Coherent-state Fock amplitudes e^{-|a|^2/2} a^n / sqrt(n!) via lgamma.
inline std::vector<cplx> poisson_amplitudes(cplx a, std::size_t truncation) {
  std::vector<cplx> v(truncation + 1);
  const double r = std::abs(a);
  const double phase = std::arg(a);
  for (std::size_t n = 0; n <= truncation; ++n) {
    const double nn = static_cast<double>(n);
    const double log_mag =
        -0.5 * r * r + (r > 0.0 ? nn * std::log(r) : (n == 0 ? 0.0 : -INFINITY)) -
        0.5 * std::lgamma(nn + 1.0);
    v[n] = std::polar(std::exp(log_mag), nn * phase);
  }
  return v;
}

// Added noise of n_A loss/gain pairs with per-amplifier gain g^{1/n_A}.
inline double cascade_noise(double g, std::size_t n_a) {
  const double n = static_cast<double>(n_a);
  return n * std::expm1(std::log(g) / n);
}

// Linear scan for the largest n with e^{-nR} >= floor.
inline std::uint64_t loss_budget_scan(double ratio, double floor) {
  std::uint64_t n = 0;
  while (std::exp(-static_cast<double>(n + 1) * ratio) >= floor) ++n;
  return n;
}

}  // namespace oracle
