#include <doctest.h>

#include <cmath>

#include "ephsim/fock_oracle.hpp"
#include "support/oracles.hpp"

using namespace ephsim;

TEST_CASE("coherent product matches Poisson amplitudes") {
  const cplx a(0.4, -0.3), b(-0.2, 0.6);
  const auto s = coherent_product(a, b, 10);
  const auto pa = oracle::poisson_amplitudes(a, 10);
  const auto pb = oracle::poisson_amplitudes(b, 10);
  for (std::size_t i = 0; i <= 10; ++i)
    for (std::size_t j = 0; j <= 10; ++j)
      CHECK(std::abs(s.amplitudes(static_cast<Eigen::Index>(i * 11 + j)) - pa[i] * pb[j]) < 1e-15);
}

TEST_CASE("Fock evolution stays a product of coherent states") {
  const FockOracleParams p;  // alpha0 = 0.5, eps = 1, omega0 = 1, t = pi/2, N = 12
  const auto r = fock_oracle(p);
  CHECK(r.fidelity > 1.0 - 1e-6);
  CHECK(r.min_fidelity > 1.0 - 1e-6);
  CHECK(r.max_edge_population < 1e-10);
  CHECK(r.checkpoints.size() == p.checkpoints);

  // Beam-splitter closed form for the final amplitudes.
  const auto ref = oracle::rabi_absorber(p.alpha0, p.epsilon, p.omega0, p.t_end);
  CHECK(std::abs(r.alpha - ref.alpha) < 1e-8);
  CHECK(std::abs(r.beta - ref.beta) < 1e-8);

  // Overlap with an independently built product state.
  const auto pa = oracle::poisson_amplitudes(ref.alpha, p.truncation);
  const auto pb = oracle::poisson_amplitudes(ref.beta, p.truncation);
  cplx overlap = 0.0;
  const std::size_t dim = p.truncation + 1;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      overlap += std::conj(pa[i] * pb[j]) * r.state.amplitudes(static_cast<Eigen::Index>(i * dim + j));
  CHECK(std::norm(overlap) > 1.0 - 1e-9);
}

TEST_CASE("corrupted amplitudes fail the fidelity test") {
  const auto r = fock_oracle(FockOracleParams{});
  CHECK(product_state_fidelity(r.state, r.alpha, -r.beta) < 0.999);
  CHECK(product_state_fidelity(r.state, r.alpha + 0.01, r.beta) < 1.0 - 1e-6);
}

TEST_CASE("detuned single-mode exchange is still a coherent product") {
  FockOracleParams p;
  p.omega0 = 2.0;
  p.epsilon = 0.3;
  p.t_end = 4.0;
  p.alpha0 = cplx(0.3, 0.4);
  const auto r = fock_oracle(p);
  CHECK(r.min_fidelity > 1.0 - 1e-6);
}

TEST_CASE("truncation leakage is reported") {
  FockOracleParams p;
  p.alpha0 = 3.0;
  p.truncation = 4;
  CHECK_THROWS_AS(fock_oracle(p), TruncationError);
}

TEST_CASE("edge population of a low-amplitude product is negligible") {
  const auto s = coherent_product(0.1, 0.1, 8);
  CHECK(edge_population(s) < 1e-15);
  const auto big = coherent_product(2.0, 0.0, 3);
  CHECK(edge_population(big) > 0.1);
}
