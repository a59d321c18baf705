#pragma once

#include <Eigen/Dense>

namespace hriex {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Mat24 = Eigen::Matrix<double, 2, 4>;
using Mat42 = Eigen::Matrix<double, 4, 2>;
using RowVec4 = Eigen::Matrix<double, 1, 4>;
using RowVec2 = Eigen::Matrix<double, 1, 2>;

/// Planar position + velocity of one agent. Stacked order: (px, py, vx, vy).
struct AgentState {
  Vec2 pos = Vec2::Zero();
  Vec2 vel = Vec2::Zero();

  Vec4 stacked() const {
    Vec4 x;
    x << pos, vel;
    return x;
  }
  static AgentState from_stacked(const Vec4& x) { return {x.head<2>(), x.tail<2>()}; }
  bool finite() const { return pos.allFinite() && vel.allFinite(); }
};

/// Joint simulation state. Goals are pure positions; embedded in state space
/// they carry zero velocity.
struct EnvState {
  AgentState human;
  AgentState robot;
  Vec2 human_goal = Vec2::Zero();
  Vec2 robot_goal = Vec2::Zero();
  int k = 0;
};

inline Vec4 goal_state(const Vec2& goal_pos) {
  Vec4 g;
  g << goal_pos, 0.0, 0.0;
  return g;
}

/// One sampled (human, robot, human-goal) snapshot; the unit of trajectory
/// datasets and of the model-input history windows.
struct StateTriple {
  Vec4 human = Vec4::Zero();
  Vec4 robot = Vec4::Zero();
  Vec2 goal = Vec2::Zero();
};

/// Discrete-time control-affine robot: x' = drift_matrix * x + input_matrix * u.
/// The default is a zero-order-hold double integrator so that a control applied
/// at step k already moves the position at step k+1 (the exploration objective
/// and the one-step reachable set both need that coupling).
struct RobotDynamics {
  double ts = 0.1;
  Vec2 control_bounds = Vec2(5.0, 5.0);  // per-axis |u_i| <= bound
  Mat4 drift_matrix = Mat4::Identity();
  Mat42 input_matrix = Mat42::Zero();

  static RobotDynamics double_integrator(double ts, const Vec2& control_bounds);
};

Vec2 clip_control(const Vec2& u, const Vec2& bounds);

/// One robot step. Throws InvalidStateError on non-finite state or control.
AgentState step_robot(const RobotDynamics& dyn, const AgentState& x_r, const Vec2& u_r);

}  // namespace hriex
