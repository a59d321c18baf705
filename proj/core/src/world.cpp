#include "hriex/world.hpp"

#include <algorithm>

#include "hriex/errors.hpp"

namespace hriex {

RobotDynamics RobotDynamics::double_integrator(double ts, const Vec2& control_bounds) {
  RobotDynamics dyn;
  dyn.ts = ts;
  dyn.control_bounds = control_bounds;
  dyn.drift_matrix = Mat4::Identity();
  dyn.drift_matrix(0, 2) = ts;
  dyn.drift_matrix(1, 3) = ts;
  dyn.input_matrix = Mat42::Zero();
  dyn.input_matrix(0, 0) = 0.5 * ts * ts;
  dyn.input_matrix(1, 1) = 0.5 * ts * ts;
  dyn.input_matrix(2, 0) = ts;
  dyn.input_matrix(3, 1) = ts;
  return dyn;
}

Vec2 clip_control(const Vec2& u, const Vec2& bounds) {
  return Vec2(std::clamp(u.x(), -bounds.x(), bounds.x()),
              std::clamp(u.y(), -bounds.y(), bounds.y()));
}

AgentState step_robot(const RobotDynamics& dyn, const AgentState& x_r, const Vec2& u_r) {
  if (!x_r.finite() || !u_r.allFinite()) {
    throw InvalidStateError("step_robot: non-finite state or control");
  }
  const Vec4 next = dyn.drift_matrix * x_r.stacked() + dyn.input_matrix * u_r;
  return AgentState::from_stacked(next);
}

}  // namespace hriex
