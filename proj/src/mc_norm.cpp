#include "ephsim/mc_norm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace ephsim {

namespace {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Fisher-Yates with an explicit index draw, so the sequence does not depend on
// the standard library's shuffle implementation.
std::vector<std::uint32_t> permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::uint32_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<std::uint32_t>(i);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(i));
    std::swap(v[i - 1], v[std::min(j, i - 1)]);
  }
  return v;
}

// K(s) = floor + P(s) with floor = e^{-|alpha|^2}; P is the peaked part.
class PeakSampler {
 public:
  PeakSampler(double alpha_sq, double sigma_p, double max_span)
      : alpha_sq_(alpha_sq), sigma_p_(sigma_p), floor_(std::exp(-alpha_sq)) {
    // P(s) < e^{-40} P(0) beyond this reach.
    span_ = std::min(max_span, 2.0 * sigma_p * std::sqrt(std::log(alpha_sq + 1.0) + 40.0));
    const auto cells = static_cast<std::size_t>(std::ceil(2.0 * span_ / (sigma_p / 200.0)));
    h_ = 2.0 * span_ / static_cast<double>(cells);
    mass_.resize(cells);
    cdf_.assign(cells + 1, 0.0);
    for (std::size_t c = 0; c < cells; ++c) {
      const double a = -span_ + h_ * static_cast<double>(c);
      mass_[c] = h_ / 6.0 * (peak(a) + 4.0 * peak(a + 0.5 * h_) + peak(a + h_));
      cdf_[c + 1] = cdf_[c] + mass_[c];
    }
  }

  double floor() const { return floor_; }

  double peak(double s) const {
    const double u = s / (2.0 * sigma_p_);
    return floor_ * std::expm1(alpha_sq_ * std::exp(-u * u));
  }

  // Draws s from the piecewise-constant proposal restricted to [lo, hi] and
  // returns it with the weight P(s) / q(s) for that restricted density.
  std::pair<double, double> draw(double u, double lo, double hi) const {
    const double a = cumulative(lo);
    const double b = cumulative(hi);
    if (!(b > a)) return {0.5 * (lo + hi), 0.0};
    const double target = a + u * (b - a);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
    auto c = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cdf_.begin() - 1, 0));
    c = std::min(c, mass_.size() - 1);
    if (!(mass_[c] > 0.0)) return {0.5 * (lo + hi), 0.0};
    const double frac = std::clamp((target - cdf_[c]) / mass_[c], 0.0, 1.0);
    const double s = std::clamp(-span_ + h_ * (static_cast<double>(c) + frac), lo, hi);
    const double q = mass_[c] / (h_ * (b - a));
    return {s, peak(s) / q};
  }

 private:
  double cumulative(double s) const {
    if (s <= -span_) return 0.0;
    if (s >= span_) return cdf_.back();
    const auto c = std::min(static_cast<std::size_t>((s + span_) / h_), mass_.size() - 1);
    const double a = -span_ + h_ * static_cast<double>(c);
    return cdf_[c] + mass_[c] * (s - a) / h_;
  }

  double alpha_sq_;
  double sigma_p_;
  double floor_;
  double span_ = 0.0;
  double h_ = 0.0;
  std::vector<double> mass_;
  std::vector<double> cdf_;
};

}  // namespace

McNormResult monte_carlo_norm(const HoleEnvelope& envelope, double alpha_sq, double sigma_p,
                              std::size_t samples, std::uint64_t seed) {
  if (samples < 4) throw std::invalid_argument("monte_carlo_norm: need at least four samples");
  if (samples > 0xffffffffu) throw std::invalid_argument("monte_carlo_norm: too many samples");
  if (!(sigma_p > 0.0) || !(alpha_sq >= 0.0)) {
    throw std::invalid_argument("monte_carlo_norm: invalid packet parameters");
  }
  const double lo = envelope.x_min;
  const double hi = envelope.x_max;
  const double len = hi - lo;
  if (!(len > 0.0)) throw std::invalid_argument("monte_carlo_norm: empty support box");

  const auto side = static_cast<std::size_t>(std::sqrt(static_cast<double>(samples)));
  const std::size_t n = side * side;

  std::mt19937_64 rng(seed);
  const PeakSampler sampler(alpha_sq, sigma_p, len);
  const double c = sampler.floor();

  const auto p1 = permutation(n, rng);
  const auto p2 = permutation(n, rng);
  const auto p3 = permutation(n, rng);
  const auto p4 = permutation(n, rng);
  const double inv_n = 1.0 / static_cast<double>(n);
  auto strat = [&](const std::vector<std::uint32_t>& p, std::size_t i) {
    return (static_cast<double>(p[i]) + unit_uniform(rng)) * inv_n;
  };

  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // (x1, x2) jittered on a side x side grid; the other four coordinates are
    // Latin-hypercube stratified.
    const double x1 = lo + len * (static_cast<double>(i / side) + unit_uniform(rng)) /
                               static_cast<double>(side);
    const double x2 = lo + len * (static_cast<double>(i % side) + unit_uniform(rng)) /
                               static_cast<double>(side);
    const auto [s1, w1] = sampler.draw(strat(p1, i), lo - x1, hi - x1);
    const auto [s2, w2] = sampler.draw(strat(p2, i), lo - x2, hi - x2);
    const double z1 = lo + len * strat(p3, i);
    const double z2 = lo + len * strat(p4, i);
    const double y1 = x1 + s1;
    const double y2 = x2 + s2;
    // K1 K2 = P1 P2 + c P1 + c P2 + c^2, the floor terms integrated uniformly.
    const double inner = envelope(y1, y2) * w1 * w2 + c * len * envelope(y1, z2) * w1 +
                         c * len * envelope(z1, y2) * w2 + c * c * len * len * envelope(z1, z2);
    const double value = envelope(x1, x2) * inner * len * len;
    sum += value;
    sum_sq += value * value;
  }
  const double mean = sum * inv_n;
  const double var = std::max(sum_sq * inv_n - mean * mean, 0.0);
  McNormResult r;
  r.raw_norm = mean;
  r.chi = mean > 0.0 ? 1.0 / std::sqrt(mean) : 0.0;
  r.std_error = std::sqrt(var * inv_n);
  r.samples = n;
  return r;
}

}  // namespace ephsim
