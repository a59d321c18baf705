#pragma once

#include <limits>

#include "hriex/adapt.hpp"
#include "hriex/world.hpp"

namespace hriex {

/// Parameters of the energy-function safety index
///   phi = d_min^2 + rho - d^2 - k_phi * d_dot,
/// with the adaptive margin rho = (eta_R + lambda_sea_prev) * ts.
struct SafetyIndexParams {
  double d_min = 1.0;     // minimum safe distance (m)
  double k_phi = 1.0;     // gain on the distance rate (s)
  double eta_R = 0.5;     // decrease-rate margin (1/s)
  double lambda_0 = 0.01; // base bound on unmodeled uncertainty
  double ts = 0.1;
};

struct PhiValue {
  double phi = 0.0;   // energy function value
  double phi0 = 0.0;  // d_min - d, the raw safety specification
};

struct PhiGradients {
  RowVec4 d_x_r = RowVec4::Zero();  // d(phi)/d(x_R), rho held fixed
  RowVec4 d_x_h = RowVec4::Zero();  // d(phi)/d(x_H)
};

/// Half-space of safe controls {u : L u <= S}. S is +inf while phi < 0.
struct SafeControlSet {
  RowVec2 L = RowVec2::Zero();
  double S = std::numeric_limits<double>::infinity();
  double phi_value = 0.0;
  double phi0_value = 0.0;
  double lambda_sea = 0.0;
};

struct MonitorResult {
  Vec2 u_safe = Vec2::Zero();
  bool intervened = false;   // output differs from the reference beyond 1e-9
  bool infeasible = false;   // half-space excludes the whole control box
};

double margin(const SafetyIndexParams& p, double lambda_sea_prev);

/// phi and phi0 at the current state. Throws GeometryError when d == 0.
PhiValue safety_index(const SafetyIndexParams& p, const EnvState& env,
                      double lambda_sea_prev);

PhiGradients phi_gradients(const SafetyIndexParams& p, const EnvState& env);

/// Builds the 3-sigma-robust half-space from the predicted human distribution:
///   lambda_sea = (3/ts) * sqrt(grad_H Sigma_H grad_H^T) + lambda_0,
///   L = grad_R * (input_matrix / ts),
///   S = -eta_R - lambda_sea - grad_H * xdot_hat_H - grad_R * drift rate.
SafeControlSet safe_control_set(const SafetyIndexParams& p, const EnvState& env,
                                const Prediction& prediction, const RobotDynamics& dyn,
                                double lambda_sea_prev);

/// Projects u_ref onto {L u <= S} intersected with the box |u_i| <= bounds_i:
/// the exact minimizer of ||u - u_ref||. When the intersection is empty,
/// returns the box point minimizing L u and flags infeasible.
MonitorResult monitor(const SafeControlSet& set, const Vec2& u_ref, const Vec2& bounds);

}  // namespace hriex
