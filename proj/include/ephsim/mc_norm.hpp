#pragma once

#include <cstddef>
#include <cstdint>

#include "ephsim/holestate.hpp"

namespace ephsim {

struct McNormResult {
  double raw_norm = 0.0;  ///< estimate of <psi|psi> at chi = 1
  double chi = 0.0;       ///< 1 / sqrt(raw_norm)
  double std_error = 0.0; ///< naive i.i.d. standard error of raw_norm (conservative under LHS)
  std::size_t samples = 0; ///< samples used (largest square not above the request)
};

/// Monte-Carlo estimate of the continuum hole-state norm
///   int f(x1,x2) f(x1',x2') K(x1'-x1) K(x2'-x2) over the support box^4,
/// with the closed-form Gaussian-packet kernel K(s) = exp(|alpha|^2 (e^{-s^2/4 sigma^2} - 1)).
/// K is split into its constant floor e^{-|alpha|^2} and a peaked remainder; the
/// peaked part is importance sampled, the floor integrated uniformly. Positions
/// are stratified on a square grid. Shares no code with the deterministic quadrature.
McNormResult monte_carlo_norm(const HoleEnvelope& envelope, double alpha_sq, double sigma_p,
                              std::size_t samples, std::uint64_t seed);

}  // namespace ephsim
