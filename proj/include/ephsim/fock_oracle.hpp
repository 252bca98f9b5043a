#pragma once

#include <cstddef>
#include <stdexcept>

#include <Eigen/Dense>

#include "ephsim/wavepacket.hpp"

namespace ephsim {

class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One field mode and one oscillator, both resonant at omega0, coupled by
/// epsilon (a^dag b + b^dag a). The field starts in |alpha0>, the oscillator in |0>.
struct FockOracleParams {
  cplx alpha0 = 0.5;
  double epsilon = 1.0;
  double omega0 = 1.0;
  double t_end = kPi / 2.0;
  std::size_t truncation = 12;
  /// Times (including t_end) at which fidelity and leakage are evaluated.
  std::size_t checkpoints = 8;
  /// RK4 step as a fraction of 1 / max frequency for the coherent-amplitude side.
  double dt_factor = 0.01;
};

/// Joint state on |n_field, n_osc>, 0 <= n <= truncation, index n_field * (N+1) + n_osc.
struct FockState {
  std::size_t truncation = 0;
  Eigen::VectorXcd amplitudes;
};

struct FockCheckpoint {
  double t = 0.0;
  cplx alpha;
  cplx beta;
  double fidelity = 0.0;
  double edge_population = 0.0;
};

struct FockOracleResult {
  double fidelity = 0.0;  ///< at t_end
  double min_fidelity = 1.0;
  double max_edge_population = 0.0;
  cplx alpha;
  cplx beta;
  FockState state;
  std::vector<FockCheckpoint> checkpoints;
};

/// Product coherent state |alpha>|beta> projected on the truncated basis.
FockState coherent_product(cplx alpha, cplx beta, std::size_t truncation);

/// |<alpha, beta | psi>|^2
double product_state_fidelity(const FockState& psi, cplx alpha, cplx beta);

/// Population on basis states with either occupation at the truncation edge.
double edge_population(const FockState& psi);

/// Exact evolution in the truncated Fock basis compared with the integrated
/// coherent amplitudes. Throws TruncationError when edge population exceeds 1e-10.
FockOracleResult fock_oracle(const FockOracleParams& params);

}  // namespace ephsim
