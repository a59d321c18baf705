#include "hriex/human.hpp"

#include <cmath>

#include "hriex/errors.hpp"

namespace hriex {

PotentialFieldHuman PotentialFieldHuman::standard(double gamma, double ts, double k_p,
                                                  double k_d, double k_r,
                                                  const Mat4& noise_cov) {
  PotentialFieldHuman h;
  h.gamma = gamma;
  h.ts = ts;
  h.k_goal.setZero();
  h.k_goal.block<2, 2>(0, 0) = k_p * Mat2::Identity();
  h.k_goal.block<2, 2>(0, 2) = k_d * Mat2::Identity();
  h.k_repel.setZero();
  h.k_repel.block<2, 2>(0, 0) = k_r * Mat2::Identity();
  h.noise_cov = noise_cov;
  return h;
}

FeatureVector features(const AgentState& human, const AgentState& robot,
                       const Vec2& human_goal) {
  FeatureVector f;
  const Vec2 goal_error = human.pos - human_goal;
  const Vec2 offset = human.pos - robot.pos;
  double d = offset.norm();
  if (d <= kMinAgentDistance) {
    d = kMinAgentDistance;
    f.near_singular = true;
  }
  f.values << goal_error, offset / (d * d);
  if (!f.values.allFinite()) {
    throw InvalidStateError("features: non-finite input state");
  }
  return f;
}

Vec2 human_control(const PotentialFieldHuman& h, const EnvState& env) {
  const FeatureVector f = features(env.human, env.robot, env.human_goal);
  // Goal attraction splits into the position error (carried by the feature)
  // and the velocity feedback; repulsion is gamma times the scaled feature.
  const Vec2 attract = -h.k_goal.block<2, 2>(0, 0) * f.values.head<2>() -
                       h.k_goal.block<2, 2>(0, 2) * env.human.vel;
  const Vec2 repel = h.gamma * (h.k_repel.block<2, 2>(0, 0) * f.values.tail<2>());
  return attract + repel;
}

AgentState step_human(const PotentialFieldHuman& h, const EnvState& env,
                      std::mt19937_64& rng) {
  const Vec2 accel = human_control(h, env);
  AgentState next;
  next.pos = env.human.pos + h.ts * env.human.vel;
  next.vel = env.human.vel + h.ts * accel;
  if (!h.noise_cov.isZero(0.0)) {
    std::normal_distribution<double> unit(0.0, 1.0);
    Vec4 z;
    for (int i = 0; i < 4; ++i) z(i) = unit(rng);
    const Eigen::LLT<Mat4> llt(h.noise_cov);
    const Vec4 noisy = next.stacked() + llt.matrixL() * z;
    next = AgentState::from_stacked(noisy);
  }
  if (!next.finite()) {
    throw InvalidStateError("step_human: produced non-finite state");
  }
  return next;
}

LinearHumanModel ground_truth_params(const PotentialFieldHuman& h) {
  if (!h.k_repel.block<2, 2>(0, 2).isZero(0.0)) {
    throw ConfigError("ground_truth_params: k_repel velocity block must be zero");
  }
  LinearHumanModel m;
  // Position rows integrate velocity; velocity rows carry the k_goal velocity
  // feedback. The position error and scaled repulsion live in the feature.
  m.A.setIdentity();
  m.A.block<2, 2>(0, 2) = h.ts * Mat2::Identity();
  m.A.block<2, 2>(2, 2) -= h.ts * h.k_goal.block<2, 2>(0, 2);
  m.B.setZero();
  m.B.block<2, 2>(2, 0) = -h.ts * h.k_goal.block<2, 2>(0, 0);
  m.B.block<2, 2>(2, 2) = h.ts * h.gamma * h.k_repel.block<2, 2>(0, 0);
  return m;
}

}  // namespace hriex
