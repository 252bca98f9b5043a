#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "ephsim/wavepacket.hpp"

namespace ephsim {

enum class HoleProfile {
  smoothstep,  ///< zero inside |x1-x2| < d, cubic ramp to 1 at 4d
  flat,        ///< f == 1 everywhere (separable control, no hole)
};

/// Two-beam envelope f(x1, x2) of the entangled hole state.
struct HoleEnvelope {
  double d = 10.0;
  HoleProfile profile = HoleProfile::smoothstep;
  double x_min = 0.0;
  double x_max = 100.0;

  double operator()(double x1, double x2) const;
};

/// Cubic smoothstep: 0 for u <= 0, 3u^2 - 2u^3 on (0,1), 1 for u >= 1.
double smoothstep(double u);

/// Construction parameters for a discretized hole state.
struct HoleStateParams {
  double sigma_p = 1.0;
  double d = 10.0;
  cplx alpha = cplx(std::sqrt(10.0), 0.0);
  double box = 100.0;
  std::size_t nodes = 201;
  double k0 = 20.0;
  /// 0 selects the smallest odd grid whose alias-free window covers the box.
  std::size_t n_modes = 0;
  HoleProfile profile = HoleProfile::smoothstep;
};

/// chi * sum_{x1,x2} w1 w2 f(x1,x2) |alpha(x1)>|alpha(x2)> with quadrature weights w.
class HoleState {
 public:
  const HoleEnvelope& envelope() const { return envelope_; }
  cplx alpha() const { return alpha_; }
  double sigma_p() const { return sigma_p_; }
  const ModeGrid& grid() const { return grid_; }
  const std::vector<double>& x1_nodes() const { return x1_; }
  const std::vector<double>& x2_nodes() const { return x2_; }
  const std::vector<double>& x1_weights() const { return w1_; }
  const std::vector<double>& x2_weights() const { return w2_; }
  double chi() const { return chi_; }
  bool normalized() const { return chi_ > 0.0; }

  /// <alpha(x1_nodes[i]) | alpha(x1_nodes[j])>
  const Eigen::MatrixXcd& kernel1() const { return kernel1_; }
  const Eigen::MatrixXcd& kernel2() const { return kernel2_; }

  /// Norm of the state with the current chi (0 when chi unset).
  double norm_squared() const;
  /// Norm with chi = 1.
  double raw_norm_squared() const;

 private:
  friend HoleState make_hole_state(const HoleStateParams& params);
  friend HoleState make_hole_state(const HoleEnvelope&, cplx, double, const ModeGrid&,
                                   std::vector<double>, std::vector<double>);
  friend HoleState normalize(HoleState state);

  HoleState(const HoleEnvelope& env, cplx alpha, double sigma_p, const ModeGrid& grid,
            std::vector<double> x1, std::vector<double> x2);

  HoleEnvelope envelope_;
  cplx alpha_;
  double sigma_p_;
  ModeGrid grid_;
  std::vector<double> x1_, x2_;
  std::vector<double> w1_, w2_;
  Eigen::MatrixXcd kernel1_, kernel2_;
  double chi_ = 0.0;
};

/// <alpha(a)|alpha(b)> = exp(|alpha|^2 (O(a,b) - 1)), O the packet mode overlap.
cplx coherent_overlap(cplx alpha, double a, double b, const ModeGrid& grid, double sigma_p);

/// Smallest odd mode count whose alias-free window covers separations up to `span`.
std::size_t modes_for_span(double span, double sigma_p);

/// n equally spaced nodes on [x_min, x_max]; n == 1 gives the midpoint.
std::vector<double> uniform_nodes(double x_min, double x_max, std::size_t n);
/// Trapezoid weights, end-corrected (Gregory) for uniform grids of 7 or more
/// nodes; a single node gets weight 1.
std::vector<double> quadrature_weights(const std::vector<double>& nodes);

/// Unnormalized state (chi = 0) from desk-scale parameters.
HoleState make_hole_state(const HoleStateParams& params);
/// Unnormalized state on explicit quadrature nodes.
HoleState make_hole_state(const HoleEnvelope& envelope, cplx alpha, double sigma_p,
                          const ModeGrid& grid, std::vector<double> x1_nodes,
                          std::vector<double> x2_nodes);

/// Sets chi so that the quadrature norm equals one. Throws std::runtime_error
/// when the quadrature norm is not positive.
HoleState normalize(HoleState state);

/// Unnormalized second-order correlation G2(x_a, x_b) = || E2+(x_b) E1+(x_a) psi ||^2.
double joint_detection(const HoleState& state, double x_a, double x_b);

struct CorrelationMap {
  std::vector<double> delta_x;
  std::vector<double> g2;
};

/// Samples joint_detection along x_a - x_b = delta_x with (x_a + x_b)/2 at the box centre.
CorrelationMap correlation_scan(const HoleState& state, double delta_min, double delta_max,
                                std::size_t n_samples);

/// Full width of the central dip at half the mean of the two end samples.
double dip_full_width(const CorrelationMap& map);

}  // namespace ephsim
