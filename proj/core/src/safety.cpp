#include "hriex/safety.hpp"

#include <algorithm>
#include <cmath>

#include "hriex/errors.hpp"

namespace hriex {

namespace {

constexpr double kInterventionTol = 1e-9;

struct Geometry {
  Vec2 dp;      // p_R - p_H
  Vec2 dv;      // v_R - v_H
  double d;
  double d_dot; // (dp . dv) / d
};

Geometry geometry(const EnvState& env) {
  Geometry g;
  g.dp = env.robot.pos - env.human.pos;
  g.dv = env.robot.vel - env.human.vel;
  g.d = g.dp.norm();
  if (g.d <= 0.0) {
    throw GeometryError("safety index undefined: agents are coincident");
  }
  g.d_dot = g.dp.dot(g.dv) / g.d;
  return g;
}

}  // namespace

double margin(const SafetyIndexParams& p, double lambda_sea_prev) {
  return (p.eta_R + lambda_sea_prev) * p.ts;
}

PhiValue safety_index(const SafetyIndexParams& p, const EnvState& env,
                      double lambda_sea_prev) {
  const Geometry g = geometry(env);
  PhiValue v;
  v.phi = p.d_min * p.d_min + margin(p, lambda_sea_prev) - g.d * g.d - p.k_phi * g.d_dot;
  v.phi0 = p.d_min - g.d;
  return v;
}

PhiGradients phi_gradients(const SafetyIndexParams& p, const EnvState& env) {
  const Geometry g = geometry(env);
  const double d = g.d;
  const double d3 = d * d * d;

  // phi = const - dp.dp - k_phi * (dp.dv)/d, antisymmetric in (robot, human).
  const RowVec2 grad_d2_pr = 2.0 * g.dp.transpose();
  const RowVec2 grad_ddot_pr =
      g.dv.transpose() / d - (g.dp.dot(g.dv) / d3) * g.dp.transpose();
  const RowVec2 grad_ddot_vr = g.dp.transpose() / d;

  PhiGradients grads;
  grads.d_x_r << -grad_d2_pr - p.k_phi * grad_ddot_pr, -p.k_phi * grad_ddot_vr;
  grads.d_x_h = -grads.d_x_r;
  return grads;
}

SafeControlSet safe_control_set(const SafetyIndexParams& p, const EnvState& env,
                                const Prediction& prediction, const RobotDynamics& dyn,
                                double lambda_sea_prev) {
  const PhiValue value = safety_index(p, env, lambda_sea_prev);
  const PhiGradients grads = phi_gradients(p, env);

  SafeControlSet set;
  set.phi_value = value.phi;
  set.phi0_value = value.phi0;

  const double variance =
      (grads.d_x_h * prediction.sigma_H_next * grads.d_x_h.transpose())(0, 0);
  set.lambda_sea = (3.0 / p.ts) * std::sqrt(std::max(variance, 0.0)) + p.lambda_0;

  set.L = grads.d_x_r * (dyn.input_matrix / p.ts);

  if (value.phi < 0.0) {
    set.S = std::numeric_limits<double>::infinity();
    return set;
  }

  // Discrete rates: robot drift (A - I) x / ts, human displacement / ts.
  const Vec4 robot_drift_rate =
      (dyn.drift_matrix - Mat4::Identity()) * env.robot.stacked() / p.ts;
  const Vec4 human_rate = (prediction.x_hat_next - env.human.stacked()) / p.ts;
  set.S = -p.eta_R - set.lambda_sea - (grads.d_x_h * human_rate)(0, 0) -
          (grads.d_x_r * robot_drift_rate)(0, 0);
  return set;
}

MonitorResult monitor(const SafeControlSet& set, const Vec2& u_ref, const Vec2& bounds) {
  if (!u_ref.allFinite()) {
    throw InvalidStateError("monitor: non-finite reference control");
  }
  MonitorResult res;
  auto finish = [&](const Vec2& u) {
    res.u_safe = u;
    res.intervened = (u - u_ref).norm() > kInterventionTol;
    return res;
  };

  const Vec2 boxed = clip_control(u_ref, bounds);
  const double l_norm2 = set.L.squaredNorm();

  if (l_norm2 == 0.0) {
    if (set.S < 0.0) res.infeasible = true;  // 0 <= S fails for every u
    return finish(boxed);
  }
  if (!(std::isfinite(set.S))) {
    return finish(boxed);  // phi < 0: only the box constrains
  }
  if ((set.L * boxed)(0) <= set.S) {
    return finish(boxed);  // box projection already safe -> optimal
  }

  // The half-space is active at the optimum: minimize over the segment
  // {L u = S} within the box. Clamp the line parameter to the box window.
  const Vec2 l = set.L.transpose();
  const Vec2 point = l * (set.S / l_norm2);       // closest line point to origin
  const Vec2 dir = Vec2(-l.y(), l.x()).normalized();
  double t_lo = -std::numeric_limits<double>::infinity();
  double t_hi = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 2; ++axis) {
    const double p0 = point(axis);
    const double dd = dir(axis);
    if (std::abs(dd) < 1e-300) {
      if (std::abs(p0) > bounds(axis)) {
        t_lo = 1.0;
        t_hi = 0.0;  // line misses the box
      }
      continue;
    }
    double a = (-bounds(axis) - p0) / dd;
    double b = (bounds(axis) - p0) / dd;
    if (a > b) std::swap(a, b);
    t_lo = std::max(t_lo, a);
    t_hi = std::min(t_hi, b);
  }

  if (t_lo > t_hi) {
    // Box and half-space are disjoint: fall back to the box point with the
    // least constraint violation (minimizes L u).
    res.infeasible = true;
    Vec2 fallback;
    for (int axis = 0; axis < 2; ++axis) {
      if (l(axis) > 0.0)
        fallback(axis) = -bounds(axis);
      else if (l(axis) < 0.0)
        fallback(axis) = bounds(axis);
      else
        fallback(axis) = boxed(axis);
    }
    return finish(fallback);
  }

  const double t_star = std::clamp(dir.dot(u_ref - point), t_lo, t_hi);
  return finish(point + t_star * dir);
}

}  // namespace hriex
