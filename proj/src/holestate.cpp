#include "ephsim/holestate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ephsim {

namespace {

// Packets farther than this from a detector contribute below e^{-32}.
constexpr double kBlockSigmas = 8.0;

bool is_uniform(const std::vector<double>& x) {
  if (x.size() < 3) return true;
  const double h = x[1] - x[0];
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (std::abs((x[i] - x[i - 1]) - h) > 1e-12 * std::abs(h)) return false;
  }
  return true;
}

// O(a, b) = sum_k |c_k|^2 e^{-i(k - k0)(b - a)} depends only on b - a.
class OverlapTable {
 public:
  OverlapTable(const ModeGrid& grid, double sigma_p)
      : grid_(grid), weight_(gaussian_coefficients(grid, 0.0, sigma_p).coeffs) {
    for (auto& c : weight_) c = std::norm(c);
  }

  cplx operator()(double a, double b) const {
    const double delta = b - a;
    if (std::abs(delta) > grid_.window_half_width() * (1.0 + 1e-12)) {
      throw std::domain_error("coherent overlap: separation " + std::to_string(delta) +
                              " exceeds the alias-free window " +
                              std::to_string(grid_.window_half_width()));
    }
    cplx acc = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      acc += weight_[i] * std::polar(1.0, -(grid_.k(i) - grid_.k0()) * delta);
    }
    return acc;
  }

 private:
  const ModeGrid& grid_;
  std::vector<cplx> weight_;
};

Eigen::MatrixXcd coherent_kernel(const std::vector<double>& x, cplx alpha,
                                 const ModeGrid& grid, double sigma_p) {
  const OverlapTable overlap(grid, sigma_p);
  const double n_bar = std::norm(alpha);
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXcd k(n, n);
  if (is_uniform(x)) {
    // Toeplitz: one mode sum per separation.
    std::vector<cplx> row(x.size());
    for (std::size_t m = 0; m < x.size(); ++m) {
      row[m] = std::exp(n_bar * (overlap(x[0], x[m]) - 1.0));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        k(i, j) = row[static_cast<std::size_t>(j - i)];
        k(j, i) = std::conj(k(i, j));
      }
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto a = x[static_cast<std::size_t>(i)];
        const auto b = x[static_cast<std::size_t>(j)];
        k(i, j) = std::exp(n_bar * (overlap(a, b) - 1.0));
      }
    }
  }
  return k;
}

// Indices of nodes within the packet reach of x.
std::vector<std::size_t> nodes_near(const std::vector<double>& nodes, double x, double reach) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (std::abs(nodes[i] - x) <= reach) out.push_back(i);
  }
  return out;
}

}  // namespace

double smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * (3.0 - 2.0 * u);
}

double HoleEnvelope::operator()(double x1, double x2) const {
  switch (profile) {
    case HoleProfile::flat:
      return 1.0;
    case HoleProfile::smoothstep:
      return smoothstep((std::abs(x1 - x2) - d) / (3.0 * d));
  }
  return 0.0;
}

cplx coherent_overlap(cplx alpha, double a, double b, const ModeGrid& grid, double sigma_p) {
  if (std::abs(b - a) > grid.window_half_width() * (1.0 + 1e-12)) {
    throw std::domain_error("coherent_overlap: centres lie outside a common window");
  }
  const auto pa = gaussian_coefficients(grid, a, sigma_p);
  const auto pb = gaussian_coefficients(grid, b, sigma_p);
  return std::exp(std::norm(alpha) * (mode_overlap(pa, pb) - 1.0));
}

std::size_t modes_for_span(double span, double sigma_p) {
  // window pi/dk >= span with dk = 16 / (sigma_p (n - 1))
  const double needed = 16.0 * span / (kPi * sigma_p) + 1.0;
  auto n = static_cast<std::size_t>(std::ceil(needed));
  n = std::max<std::size_t>(n, 17);
  if (n % 2 == 0) ++n;
  return n;
}

std::vector<double> uniform_nodes(double x_min, double x_max, std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_nodes: need at least one node");
  if (n == 1) return {0.5 * (x_min + x_max)};
  std::vector<double> x(n);
  const double h = (x_max - x_min) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) x[i] = x_min + h * static_cast<double>(i);
  return x;
}

std::vector<double> quadrature_weights(const std::vector<double>& nodes) {
  std::vector<double> w(nodes.size(), 0.0);
  if (nodes.size() == 1) {
    w[0] = 1.0;
    return w;
  }
  if (nodes.size() >= 7 && is_uniform(nodes)) {
    // Trapezoid with third-order Gregory end corrections: the integrand is cut
    // off at the box edge, where the plain rule is only O(h^2).
    const double h = nodes[1] - nodes[0];
    std::fill(w.begin(), w.end(), h);
    constexpr double end[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
    for (std::size_t i = 0; i < 3; ++i) {
      w[i] = end[i] * h;
      w[w.size() - 1 - i] = end[i] * h;
    }
    return w;
  }
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double h = nodes[i + 1] - nodes[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

HoleState::HoleState(const HoleEnvelope& env, cplx alpha, double sigma_p, const ModeGrid& grid,
                     std::vector<double> x1, std::vector<double> x2)
    : envelope_(env),
      alpha_(alpha),
      sigma_p_(sigma_p),
      grid_(grid),
      x1_(std::move(x1)),
      x2_(std::move(x2)),
      w1_(quadrature_weights(x1_)),
      w2_(quadrature_weights(x2_)),
      kernel1_(coherent_kernel(x1_, alpha_, grid_, sigma_p_)),
      kernel2_(coherent_kernel(x2_, alpha_, grid_, sigma_p_)) {}

double HoleState::raw_norm_squared() const {
  const auto n1 = static_cast<Eigen::Index>(x1_.size());
  const auto n2 = static_cast<Eigen::Index>(x2_.size());
  Eigen::MatrixXcd g(n1, n2);
  for (Eigen::Index i = 0; i < n1; ++i) {
    for (Eigen::Index j = 0; j < n2; ++j) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      g(i, j) = w1_[ui] * w2_[uj] * envelope_(x1_[ui], x2_[uj]);
    }
  }
  const Eigen::MatrixXcd kg = kernel1_ * g * kernel2_.transpose();
  return (g.conjugate().cwiseProduct(kg)).sum().real();
}

double HoleState::norm_squared() const { return chi_ * chi_ * raw_norm_squared(); }

HoleState make_hole_state(const HoleEnvelope& envelope, cplx alpha, double sigma_p,
                          const ModeGrid& grid, std::vector<double> x1_nodes,
                          std::vector<double> x2_nodes) {
  if (x1_nodes.empty() || x2_nodes.empty()) {
    throw std::invalid_argument("make_hole_state: empty quadrature grid");
  }
  return HoleState(envelope, alpha, sigma_p, grid, std::move(x1_nodes), std::move(x2_nodes));
}

HoleState make_hole_state(const HoleStateParams& p) {
  if (!(p.sigma_p > 0.0)) throw std::invalid_argument("hole state: sigma_p must be positive");
  if (p.d < 10.0 * p.sigma_p) {
    throw std::invalid_argument("hole state: d = " + std::to_string(p.d) +
                                " violates d >= 10 sigma_p");
  }
  if (p.nodes < 2) throw std::invalid_argument("hole state: need at least two nodes per beam");
  const double spacing = p.box / static_cast<double>(p.nodes - 1);
  if (spacing > 0.5 * p.sigma_p * (1.0 + 1e-12)) {
    throw std::invalid_argument("hole state: node spacing " + std::to_string(spacing) +
                                " exceeds sigma_p/2");
  }
  const std::size_t n_modes = p.n_modes == 0 ? modes_for_span(p.box, p.sigma_p) : p.n_modes;
  const auto grid = make_mode_grid(p.k0, p.sigma_p, n_modes);
  if (p.box > grid.window_half_width() * (1.0 + 1e-12)) {
    throw std::invalid_argument("hole state: box " + std::to_string(p.box) +
                                " exceeds the mode grid's alias-free window " +
                                std::to_string(grid.window_half_width()));
  }
  const HoleEnvelope env{p.d, p.profile, 0.0, p.box};
  return make_hole_state(env, p.alpha, p.sigma_p, grid, uniform_nodes(0.0, p.box, p.nodes),
                         uniform_nodes(0.0, p.box, p.nodes));
}

HoleState normalize(HoleState state) {
  const double raw = state.raw_norm_squared();
  if (!(raw > 0.0) || !std::isfinite(raw)) {
    throw std::runtime_error("normalize: quadrature norm is " + std::to_string(raw) +
                             " (envelope vanishes on the grid or grid too coarse)");
  }
  state.chi_ = 1.0 / std::sqrt(raw);
  return state;
}

double joint_detection(const HoleState& state, double x_a, double x_b) {
  if (!state.normalized()) {
    throw std::logic_error("joint_detection: state is not normalized");
  }
  const double reach = kBlockSigmas * state.sigma_p();
  const auto b1 = nodes_near(state.x1_nodes(), x_a, reach);
  const auto b2 = nodes_near(state.x2_nodes(), x_b, reach);
  if (b1.empty() || b2.empty()) return 0.0;

  // E+(x)|alpha(x')> = alpha * envelope_{x'}(x) |alpha(x')>
  auto field = [&](const std::vector<std::size_t>& block, const std::vector<double>& nodes,
                   double x) {
    Eigen::VectorXcd u(static_cast<Eigen::Index>(block.size()));
    for (std::size_t i = 0; i < block.size(); ++i) {
      const auto packet = gaussian_coefficients(state.grid(), nodes[block[i]], state.sigma_p());
      u(static_cast<Eigen::Index>(i)) = state.alpha() * packet_envelope(packet, x);
    }
    return u;
  };
  const Eigen::VectorXcd u1 = field(b1, state.x1_nodes(), x_a);
  const Eigen::VectorXcd u2 = field(b2, state.x2_nodes(), x_b);

  const auto n1 = static_cast<Eigen::Index>(b1.size());
  const auto n2 = static_cast<Eigen::Index>(b2.size());
  Eigen::MatrixXcd m(n1, n2);
  Eigen::MatrixXcd k1(n1, n1);
  Eigen::MatrixXcd k2(n2, n2);
  for (Eigen::Index i = 0; i < n1; ++i) {
    const auto gi = b1[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n2; ++j) {
      const auto gj = b2[static_cast<std::size_t>(j)];
      m(i, j) = state.x1_weights()[gi] * state.x2_weights()[gj] *
                state.envelope()(state.x1_nodes()[gi], state.x2_nodes()[gj]) * u1(i) * u2(j);
    }
    for (Eigen::Index j = 0; j < n1; ++j) {
      k1(i, j) = state.kernel1()(static_cast<Eigen::Index>(gi),
                                 static_cast<Eigen::Index>(b1[static_cast<std::size_t>(j)]));
    }
  }
  for (Eigen::Index i = 0; i < n2; ++i) {
    for (Eigen::Index j = 0; j < n2; ++j) {
      k2(i, j) = state.kernel2()(static_cast<Eigen::Index>(b2[static_cast<std::size_t>(i)]),
                                 static_cast<Eigen::Index>(b2[static_cast<std::size_t>(j)]));
    }
  }
  const Eigen::MatrixXcd km = k1 * m * k2.transpose();
  const double chi = state.chi();
  return chi * chi * (m.conjugate().cwiseProduct(km)).sum().real();
}

CorrelationMap correlation_scan(const HoleState& state, double delta_min, double delta_max,
                                std::size_t n_samples) {
  if (n_samples < 2 || !(delta_max > delta_min)) {
    throw std::invalid_argument("correlation_scan: need n_samples >= 2 and a non-empty range");
  }
  const auto& env = state.envelope();
  const double center = 0.5 * (env.x_min + env.x_max);
  const double half_box = 0.5 * (env.x_max - env.x_min);
  const double reach = kBlockSigmas * state.sigma_p();
  const double widest = std::max(std::abs(delta_min), std::abs(delta_max));
  if (0.5 * widest + reach > half_box) {
    throw std::invalid_argument("correlation_scan: |delta_x|/2 + 8 sigma_p = " +
                                std::to_string(0.5 * widest + reach) +
                                " exceeds half the support box " + std::to_string(half_box));
  }
  CorrelationMap map;
  map.delta_x.reserve(n_samples);
  map.g2.reserve(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const double dx = delta_min + (delta_max - delta_min) * static_cast<double>(s) /
                                      static_cast<double>(n_samples - 1);
    map.delta_x.push_back(dx);
    map.g2.push_back(joint_detection(state, center + 0.5 * dx, center - 0.5 * dx));
  }
  return map;
}

double dip_full_width(const CorrelationMap& map) {
  if (map.g2.size() < 3) throw std::invalid_argument("dip_full_width: map too short");
  const double plateau = 0.5 * (map.g2.front() + map.g2.back());
  const auto it_min = std::min_element(map.g2.begin(), map.g2.end());
  const auto i_min = static_cast<std::size_t>(it_min - map.g2.begin());
  const double level = *it_min + 0.5 * (plateau - *it_min);

  auto crossing = [&](std::size_t inner, std::size_t outer) {
    const double y0 = map.g2[inner];
    const double y1 = map.g2[outer];
    const double t = (level - y0) / (y1 - y0);
    return map.delta_x[inner] + t * (map.delta_x[outer] - map.delta_x[inner]);
  };
  std::size_t r = i_min;
  while (r + 1 < map.g2.size() && map.g2[r + 1] < level) ++r;
  std::size_t l = i_min;
  while (l > 0 && map.g2[l - 1] < level) --l;
  if (r + 1 >= map.g2.size() || l == 0) {
    throw std::runtime_error("dip_full_width: dip does not recover to half depth in range");
  }
  return crossing(r, r + 1) - crossing(l, l - 1);
}

}  // namespace ephsim
