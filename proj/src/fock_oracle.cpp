#include "ephsim/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ephsim/dynamics.hpp"

namespace ephsim {

namespace {

constexpr double kMaxEdgePopulation = 1e-10;

Eigen::VectorXcd coherent_vector(cplx amp, std::size_t truncation) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(truncation + 1));
  cplx term = std::exp(-0.5 * std::norm(amp));
  v(0) = term;
  for (std::size_t n = 1; n <= truncation; ++n) {
    term *= amp / std::sqrt(static_cast<double>(n));
    v(static_cast<Eigen::Index>(n)) = term;
  }
  return v;
}

}  // namespace

FockState coherent_product(cplx alpha, cplx beta, std::size_t truncation) {
  const auto a = coherent_vector(alpha, truncation);
  const auto b = coherent_vector(beta, truncation);
  const auto dim = static_cast<Eigen::Index>(truncation + 1);
  FockState s{truncation, Eigen::VectorXcd(dim * dim)};
  for (Eigen::Index na = 0; na < dim; ++na) {
    for (Eigen::Index nb = 0; nb < dim; ++nb) s.amplitudes(na * dim + nb) = a(na) * b(nb);
  }
  return s;
}

double product_state_fidelity(const FockState& psi, cplx alpha, cplx beta) {
  const auto ref = coherent_product(alpha, beta, psi.truncation);
  return std::norm(ref.amplitudes.dot(psi.amplitudes));
}

double edge_population(const FockState& psi) {
  const auto dim = static_cast<Eigen::Index>(psi.truncation + 1);
  double acc = 0.0;
  for (Eigen::Index na = 0; na < dim; ++na) {
    for (Eigen::Index nb = 0; nb < dim; ++nb) {
      if (na == dim - 1 || nb == dim - 1) acc += std::norm(psi.amplitudes(na * dim + nb));
    }
  }
  return acc;
}

FockOracleResult fock_oracle(const FockOracleParams& p) {
  if (p.truncation < 1) throw std::invalid_argument("fock_oracle: truncation must be >= 1");
  if (p.checkpoints < 1) throw std::invalid_argument("fock_oracle: need at least one checkpoint");
  if (!(p.t_end >= 0.0)) throw std::invalid_argument("fock_oracle: t_end must be >= 0");

  const std::size_t n_max = p.truncation;
  const auto dim = static_cast<Eigen::Index>(n_max + 1);

  // H = w0 (a^dag a + b^dag b) + eps (a^dag b + b^dag a), oscillator at x = 0.
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim * dim, dim * dim);
  for (Eigen::Index na = 0; na < dim; ++na) {
    for (Eigen::Index nb = 0; nb < dim; ++nb) {
      const Eigen::Index row = na * dim + nb;
      h(row, row) = p.omega0 * static_cast<double>(na + nb);
      if (na + 1 < dim && nb >= 1) {
        // a^dag b |na, nb> = sqrt(na+1) sqrt(nb) |na+1, nb-1>
        const Eigen::Index col = (na + 1) * dim + (nb - 1);
        const double m = p.epsilon * std::sqrt(static_cast<double>((na + 1) * nb));
        h(col, row) += m;
        h(row, col) += m;
      }
    }
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  const auto initial = coherent_product(p.alpha0, 0.0, n_max);
  const Eigen::VectorXcd in_eigenbasis = eig.eigenvectors().adjoint() * initial.amplitudes;

  const std::vector<double> k_values{p.omega0};
  const OscillatorBank bank{{0.0}, p.epsilon, p.omega0, false};
  const CoupledMedium medium(k_values, bank);
  const double dt = medium.max_frequency() > 0.0 ? p.dt_factor / medium.max_frequency()
                                                 : p.dt_factor;

  FockOracleResult result;
  DynamicState amps{{p.alpha0}, {cplx(0.0, 0.0)}, 0.0};
  for (std::size_t c = 1; c <= p.checkpoints; ++c) {
    const double t = p.t_end * static_cast<double>(c) / static_cast<double>(p.checkpoints);
    if (t > amps.t) {
      const double step = std::min(dt, 0.05 / std::max(medium.max_frequency(), 1e-300));
      amps = integrate(medium, amps, t, step).final_state;
    }

    Eigen::VectorXcd phased = in_eigenbasis;
    for (Eigen::Index i = 0; i < phased.size(); ++i) {
      phased(i) *= std::polar(1.0, -eig.eigenvalues()(i) * t);
    }
    FockState psi{n_max, eig.eigenvectors() * phased};

    FockCheckpoint cp{t, amps.alpha[0], amps.beta[0], product_state_fidelity(psi, amps.alpha[0],
                                                                             amps.beta[0]),
                      edge_population(psi)};
    if (cp.edge_population > kMaxEdgePopulation) {
      throw TruncationError("fock_oracle: population " + std::to_string(cp.edge_population) +
                            " at the truncation edge N = " + std::to_string(n_max) +
                            " exceeds 1e-10; increase the truncation");
    }
    result.max_edge_population = std::max(result.max_edge_population, cp.edge_population);
    result.min_fidelity = std::min(result.min_fidelity, cp.fidelity);
    result.checkpoints.push_back(cp);
    if (c == p.checkpoints) {
      result.fidelity = cp.fidelity;
      result.alpha = cp.alpha;
      result.beta = cp.beta;
      result.state = std::move(psi);
    }
  }
  return result;
}

}  // namespace ephsim
