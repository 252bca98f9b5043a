#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ephsim/holestate.hpp"
#include "ephsim/mc_norm.hpp"
#include "support/oracles.hpp"

using namespace ephsim;

namespace {

// Small state on explicit nodes, cheap enough for the brute-force oracles.
HoleState small_state(cplx alpha, HoleProfile profile = HoleProfile::smoothstep) {
  const auto grid = make_mode_grid(20.0, 1.0, modes_for_span(30.0, 1.0));
  const HoleEnvelope env{2.0, profile, 0.0, 15.0};
  auto x = uniform_nodes(0.0, 15.0, 31);
  return make_hole_state(env, alpha, 1.0, grid, x, x);
}

}  // namespace

TEST_CASE("coherent overlap limits") {
  const auto grid = make_mode_grid(20.0, 1.0, modes_for_span(100.0, 1.0));
  const cplx a(std::sqrt(10.0), 0.0);
  CHECK(std::abs(coherent_overlap(a, 3.0, 3.0, grid, 1.0) - 1.0) < 1e-14);
  CHECK(std::abs(coherent_overlap(a, 0.0, 40.0, grid, 1.0) - std::exp(-10.0)) < 1e-7);
  CHECK(coherent_overlap(0.0, 0.0, 40.0, grid, 1.0) == cplx(1.0, 0.0));
  for (double b : {0.1, 0.5, 1.0, 2.0, 7.0}) {
    const cplx o = coherent_overlap(a, 0.0, b, grid, 1.0);
    CHECK(std::abs(o) <= 1.0);
    CHECK(std::abs(o - oracle::coherent_kernel(10.0, b, 1.0)) < 1e-12);
  }
  CHECK_THROWS_AS(coherent_overlap(a, 0.0, 2.0 * grid.window_half_width(), grid, 1.0),
                  std::domain_error);
}

TEST_CASE("smoothstep envelope") {
  CHECK(smoothstep(-1.0) == 0.0);
  CHECK(smoothstep(0.5) == doctest::Approx(0.5));
  CHECK(smoothstep(2.0) == 1.0);
  const HoleEnvelope f{10.0, HoleProfile::smoothstep, 0.0, 100.0};
  CHECK(f(50.0, 50.0) == 0.0);
  CHECK(f(50.0, 59.9) == 0.0);
  CHECK(f(10.0, 50.0) == 1.0);
  CHECK(f(30.0, 55.0) == doctest::Approx(smoothstep(0.5)));
  CHECK(f(55.0, 30.0) == f(30.0, 55.0));
  const HoleEnvelope flat{10.0, HoleProfile::flat, 0.0, 100.0};
  CHECK(flat(50.0, 50.0) == 1.0);
}

TEST_CASE("quadrature weights") {
  SUBCASE("end-corrected rule integrates cubics exactly on uniform grids") {
    const auto x = uniform_nodes(-1.0, 3.0, 21);
    const auto w = quadrature_weights(x);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * (x[i] * x[i] * x[i] - 2.0 * x[i] + 1.0);
    // int_{-1}^{3} (x^3 - 2x + 1) dx = 20 - 8 + 4
    CHECK(s == doctest::Approx(16.0).epsilon(1e-13));
  }
  SUBCASE("non-uniform nodes fall back to the trapezoid rule") {
    const std::vector<double> x{0.0, 1.0, 3.0};
    const auto w = quadrature_weights(x);
    CHECK(w[0] == 0.5);
    CHECK(w[1] == 1.5);
    CHECK(w[2] == 1.0);
  }
  SUBCASE("single node") {
    CHECK(quadrature_weights({0.0}) == std::vector<double>{1.0});
    CHECK(uniform_nodes(2.0, 4.0, 1) == std::vector<double>{3.0});
  }
}

TEST_CASE("hole-state parameter checks") {
  HoleStateParams p;
  p.d = 5.0;
  CHECK_THROWS_AS(make_hole_state(p), std::invalid_argument);
  p = {};
  p.nodes = 101;  // spacing 1 > sigma_p / 2
  CHECK_THROWS_AS(make_hole_state(p), std::invalid_argument);
  p = {};
  p.n_modes = 65;  // window too small for the box
  CHECK_THROWS_AS(make_hole_state(p), std::invalid_argument);
}

TEST_CASE("normalize with alpha = 0 gives chi = 1 / integral of f") {
  auto s = normalize(small_state(0.0));
  const auto& x = s.x1_nodes();
  const auto& w = s.x1_weights();
  double integral = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) integral += w[i] * w[j] * s.envelope()(x[i], x[j]);
  CHECK(s.chi() == doctest::Approx(1.0 / integral).epsilon(1e-13));
}

TEST_CASE("normalize rejects a vanishing envelope") {
  const auto grid = make_mode_grid(20.0, 1.0, 65);
  const HoleEnvelope env{10.0, HoleProfile::smoothstep, 0.0, 0.0};
  auto s = make_hole_state(env, cplx(1.0, 0.0), 1.0, grid, {0.0}, {0.0});
  CHECK_THROWS_AS(normalize(s), std::runtime_error);
}

TEST_CASE("quadrature norm agrees with a brute-force four-fold sum") {
  const cplx alpha(std::sqrt(3.0), 0.0);
  const auto s = small_state(alpha);
  const auto f = [&](double a, double b) { return s.envelope()(a, b); };
  const double ref = oracle::brute_force_norm(f, s.x1_nodes(), s.x1_weights(), 3.0, 1.0);
  CHECK(s.raw_norm_squared() == doctest::Approx(ref).epsilon(1e-10));
  const auto n = normalize(s);
  CHECK(std::abs(n.norm_squared() - 1.0) < 1e-12);
}

TEST_CASE("joint detection agrees with a brute-force sum") {
  const cplx alpha(std::sqrt(3.0), 0.0);
  const auto s = normalize(small_state(alpha));
  const auto f = [&](double a, double b) { return s.envelope()(a, b); };
  const auto packet = gaussian_coefficients(s.grid(), 0.0, 1.0);
  for (auto [xa, xb] : {std::pair{7.5, 7.5}, std::pair{5.0, 10.0}, std::pair{9.0, 6.5}}) {
    const double ref = oracle::brute_force_g2(f, s.x1_nodes(), s.x1_weights(), 3.0, 1.0,
                                              std::abs(packet.c0), s.chi(), xa, xb);
    const double got = joint_detection(s, xa, xb);
    // Blocks drop packets beyond 8 sigma_p, which carry < e^{-32} of the amplitude.
    CHECK(got == doctest::Approx(ref).epsilon(1e-9).scale(1e-20));
  }
}

TEST_CASE("joint detection requires a normalized state") {
  CHECK_THROWS_AS(joint_detection(small_state(1.0), 5.0, 7.0), std::logic_error);
}

TEST_CASE("alpha = 0 has no photons to detect") {
  const auto s = normalize(small_state(0.0));
  CHECK(joint_detection(s, 5.0, 10.0) == 0.0);
}

TEST_CASE("global phase of alpha leaves G2 unchanged") {
  const auto s0 = normalize(small_state(cplx(std::sqrt(3.0), 0.0)));
  const auto s1 = normalize(small_state(std::polar(std::sqrt(3.0), 1.234)));
  for (auto [xa, xb] : {std::pair{7.5, 7.5}, std::pair{4.0, 11.0}, std::pair{6.0, 9.5}}) {
    const double a = joint_detection(s0, xa, xb);
    const double b = joint_detection(s1, xa, xb);
    CHECK(std::abs(a - b) <= 1e-10 * std::max(std::abs(a), 1e-300));
  }
}

TEST_CASE("default correlation scan shows the hole") {
  const auto s = normalize(make_hole_state(HoleStateParams{}));
  CHECK(std::abs(s.norm_squared() - 1.0) < 1e-6);
  const auto map = correlation_scan(s, -60.0, 60.0, 241);
  const auto lo = std::min_element(map.g2.begin(), map.g2.end());
  const auto i_min = static_cast<std::size_t>(lo - map.g2.begin());
  CHECK(map.delta_x[i_min] == doctest::Approx(0.0).epsilon(1e-12));
  for (double g : map.g2) CHECK(g >= -1e-12);

  std::vector<double> plateau;
  for (std::size_t i = 0; i < map.g2.size(); ++i)
    if (std::abs(map.delta_x[i]) >= 40.0) plateau.push_back(map.g2[i]);
  const auto [pmin, pmax] = std::minmax_element(plateau.begin(), plateau.end());
  CHECK((*pmax - *pmin) / *pmax < 0.02);
  CHECK(*lo / *pmax < std::exp(-100.0 / 8.0));
  // +-6d samples agree.
  CHECK(map.g2.front() == doctest::Approx(map.g2.back()).epsilon(0.02));

  // Golden full width at half depth for the default smoothstep profile.
  CHECK(dip_full_width(map) == doctest::Approx(58.4991).epsilon(1e-5));
}

TEST_CASE("flat envelope control has no dip") {
  HoleStateParams p;
  p.profile = HoleProfile::flat;
  const auto s = normalize(make_hole_state(p));
  const auto map = correlation_scan(s, -60.0, 60.0, 61);
  const auto [lo, hi] = std::minmax_element(map.g2.begin(), map.g2.end());
  CHECK((*hi - *lo) / *hi < 1e-10);
}

TEST_CASE("correlation scan rejects a range wider than the box allows") {
  const auto s = normalize(make_hole_state(HoleStateParams{}));
  CHECK_THROWS_AS(correlation_scan(s, -90.0, 90.0, 11), std::invalid_argument);
}

TEST_CASE("Monte-Carlo oracle reproduces chi for a 40d box") {
  HoleStateParams p;
  p.box = 400.0;
  p.nodes = 801;
  const auto s = normalize(make_hole_state(p));
  const auto mc = monte_carlo_norm(s.envelope(), 10.0, 1.0, 1000000, 12345);
  CHECK(mc.samples == 1000000);
  CHECK(std::abs(mc.chi / s.chi() - 1.0) < 1e-4);
}

TEST_CASE("Monte-Carlo oracle is deterministic per seed") {
  const HoleEnvelope env{10.0, HoleProfile::smoothstep, 0.0, 100.0};
  const auto a = monte_carlo_norm(env, 10.0, 1.0, 10000, 7);
  const auto b = monte_carlo_norm(env, 10.0, 1.0, 10000, 7);
  const auto c = monte_carlo_norm(env, 10.0, 1.0, 10000, 8);
  CHECK(a.raw_norm == b.raw_norm);
  CHECK(a.raw_norm != c.raw_norm);
  CHECK(a.samples == 10000);
}

TEST_CASE("Monte-Carlo oracle with alpha = 0 integrates f twice") {
  const HoleEnvelope env{10.0, HoleProfile::flat, 0.0, 50.0};
  const auto r = monte_carlo_norm(env, 0.0, 1.0, 40000, 3);
  CHECK(r.raw_norm == doctest::Approx(50.0 * 50.0 * 50.0 * 50.0).epsilon(1e-12));
}
