#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ephsim/chain.hpp"
#include "support/oracles.hpp"

using namespace ephsim;

TEST_CASE("segments") {
  const auto l = Segment::loss(0.5);
  const auto g = Segment::gain(2.0);
  CHECK(l.dispersion_tag > 0.0);
  CHECK(g.dispersion_tag == doctest::Approx(-l.dispersion_tag));
  CHECK_THROWS_AS(Segment::loss(1.5), std::invalid_argument);
  CHECK_THROWS_AS(Segment::loss(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Segment::gain(0.5), std::invalid_argument);
  CHECK_THROWS_AS(run_chain({}), std::invalid_argument);
}

TEST_CASE("added noise of a single amplifier at g = e^2") {
  const double g = std::exp(2.0);
  const std::vector<std::size_t> n{1};
  const auto scan = noise_scaling_scan(g, n);
  CHECK(scan.rows[0].added_noise == doctest::Approx(6.389).epsilon(1e-3 / 6.389));
  CHECK(scan.rows[0].added_noise == doctest::Approx(g - 1.0).epsilon(1e-14));
}

TEST_CASE("noise scan matches the cascade closed form and approaches ln g") {
  const double g = std::exp(2.0);
  const std::vector<std::size_t> n{100, 1, 5, 2, 10, 50, 20};
  const auto scan = noise_scaling_scan(g, n);
  CHECK(scan.strictly_decreasing);
  CHECK(scan.above_limit);
  CHECK(scan.limit == doctest::Approx(2.0));
  for (const auto& row : scan.rows) {
    CHECK(row.added_noise ==
          doctest::Approx(oracle::cascade_noise(g, row.n_amplifiers)).epsilon(1e-12));
  }
  CHECK(scan.rows.front().n_amplifiers == 1);
  CHECK((scan.rows.back().added_noise - 2.0) / 2.0 < 0.05);
}

TEST_CASE("no gain, no noise") {
  const std::vector<std::size_t> n{1, 3, 10};
  for (const auto& row : noise_scaling_scan(1.0, n).rows) CHECK(row.added_noise == 0.0);
}

TEST_CASE("noise is non-decreasing in total gain") {
  double prev = -1.0;
  for (double g : {1.0, 1.5, 3.0, 10.0, 100.0}) {
    const double n = run_chain(balanced_chain(g, 7)).added_noise_photons;
    CHECK(n >= prev);
    prev = n;
  }
}

TEST_CASE("balanced chains restore the amplitude") {
  for (std::size_t n : {1, 4, 33}) {
    CHECK(std::abs(run_chain(balanced_chain(std::exp(2.0), n)).final_amplitude_factor - 1.0) <=
          1e-12);
  }
  const std::vector<Segment> mixed{Segment::gain(4.0), Segment::loss(0.1), Segment::gain(2.5),
                                   Segment::loss(0.5), Segment::gain(2.0)};
  CHECK(std::abs(run_chain(mixed).final_amplitude_factor - 1.0) <= 1e-12);
}

TEST_CASE("chain composition is associative") {
  const std::vector<Segment> a{Segment::loss(0.3), Segment::gain(5.0)};
  const std::vector<Segment> b{Segment::gain(1.7), Segment::loss(0.8), Segment::gain(1.2)};
  std::vector<Segment> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  const auto whole = run_chain(ab);
  const auto split = propagate(b, run_chain(a));
  CHECK(std::abs(whole.final_amplitude_factor - split.final_amplitude_factor) <= 1e-12);
  CHECK(std::abs(whole.added_noise_photons - split.added_noise_photons) <= 1e-12);
  CHECK(whole.segment_count == 5);
  CHECK(whole.amplifier_count == 3);
}

TEST_CASE("swapping loss and gain negates net dispersion") {
  const std::vector<Segment> c{Segment::loss(0.3), Segment::gain(5.0), Segment::loss(0.9)};
  std::vector<Segment> swapped;
  for (const auto& s : c) {
    const double m = std::exp(std::abs(std::log(s.power_factor)));
    swapped.push_back(s.kind == SegmentKind::loss ? Segment::gain(m) : Segment::loss(1.0 / m));
  }
  CHECK(std::abs(run_chain(swapped).net_dispersion + run_chain(c).net_dispersion) < 1e-15);
}

TEST_CASE("scalar dispersion accumulator") {
  CHECK(dispersion_cancellation(0.7, 0.7) == 0.0);
  CHECK(dispersion_cancellation(0.7, 0.0) > 0.0);
  CHECK_THROWS_AS(dispersion_cancellation(-1.0, 0.0), std::invalid_argument);
}

TEST_CASE("mode-resolved drifts of matched media cancel") {
  const auto grid = make_mode_grid(10.0, 1.0, 129);
  const auto packet = gaussian_coefficients(grid, 0.0, 1.0);
  const OscillatorBank bank{{20.0, 22.5, 25.0, 27.5, 30.0}, 1e-3, 10.0, false};
  const auto residual = dispersion_cancellation_modes(packet, bank, cplx(1.0, 0.0), 40.0);
  CHECK(residual.size() == grid.size());
  double largest_drift = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(residual[i] < 1e-10);
    largest_drift = std::max(largest_drift,
                             std::abs(field_drift_second_order(grid.k(i), packet, bank, 1.0, 40.0)));
  }
  CHECK(largest_drift > 1e-6);
}
