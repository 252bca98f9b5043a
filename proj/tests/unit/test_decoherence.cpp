#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ephsim/decoherence.hpp"
#include "support/oracles.hpp"

using namespace ephsim;

TEST_CASE("visibility amplitude") {
  CHECK(std::abs(visibility_amplitude({1.0, 1e-3, 1000, 1.0}) - std::exp(-1.0)) <= 1e-12);
  CHECK(visibility_amplitude({2.0, 0.0, 1000, 0.8}) == 0.8);
  CHECK(visibility_amplitude({1.0, 1e-3, 0, 0.5}) == 0.5);
  CHECK_THROWS_AS(visibility_amplitude({0.0, 1e-3, 10, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(visibility_amplitude({1.0, -1.0, 10, 1.0}), std::invalid_argument);
}

TEST_CASE("loss budget at R = 1e-3 and floor e^-1 is 1000") {
  CHECK(loss_budget(1e-3, std::exp(-1.0)) == 1000);
}

TEST_CASE("loss budget agrees with a linear scan") {
  for (double r : {1e-3, 3.3e-3, 1e-2, 0.07, 0.5}) {
    for (double f : {0.99, 0.9, 0.5, std::exp(-1.0), 0.1}) {
      CHECK(loss_budget(r, f) == oracle::loss_budget_scan(r, f));
    }
  }
  CHECK_THROWS_AS(loss_budget(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(loss_budget(1e-3, 1.0), std::invalid_argument);
}

TEST_CASE("beam-splitter visibility") {
  CHECK(std::abs(beamsplitter_visibility({cplx(1.0, 0.0)}) - std::exp(-1.0)) <= 1e-12);
  CHECK(beamsplitter_visibility({cplx(0.0, 0.0)}) == 1.0);
}

TEST_CASE("absorption beats beam-splitter loss for the same photon count") {
  for (double n : {1.0, 10.0, 100.0}) {
    for (double r : {1e-4, 1e-3, 1e-2, 0.5}) CHECK(mechanism_contrast(n, r) > 1.0);
    CHECK(mechanism_contrast(n, 1.0) == doctest::Approx(1.0));
  }
}

TEST_CASE("atomic overlaps") {
  CHECK(excited_atom_overlap(2.0, 1.0) == doctest::Approx(std::exp(-1.0)));
  const std::vector<cplx> f{0.9, cplx(0.0, 0.5), 1.0};
  CHECK(std::abs(atomic_inner_product(f) - cplx(0.0, 0.45)) < 1e-15);
  const std::vector<cplx> bad{0.5, 1.5};
  CHECK_THROWS_AS(atomic_inner_product(bad), std::invalid_argument);
  CHECK(atomic_inner_product({}) == cplx(1.0, 0.0));
}

TEST_CASE("oscillator overlap") {
  const cplx a(0.3, 0.1), b(-0.2, 0.4);
  CHECK(std::abs(oscillator_overlap(a, a) - 1.0) < 1e-15);
  CHECK(std::abs(oscillator_overlap(a, b)) ==
        doctest::Approx(std::exp(-0.5 * std::norm(a - b))).epsilon(1e-14));
  // Poisson-amplitude inner product as a cross-check.
  const auto pa = oracle::poisson_amplitudes(a, 40);
  const auto pb = oracle::poisson_amplitudes(b, 40);
  cplx s = 0.0;
  for (std::size_t n = 0; n <= 40; ++n) s += std::conj(pa[n]) * pb[n];
  CHECK(std::abs(oscillator_overlap(a, b) - s) < 1e-14);
}
