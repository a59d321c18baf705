#include "hriex/explore.hpp"

#include <cmath>

#include "hriex/errors.hpp"
#include "hriex/human.hpp"

namespace hriex {

Observation LinearModelAdapter::observe(const EnvState& env, const BeliefState& belief) const {
  const FeatureVector f = features(env.human, env.robot, env.human_goal);
  Observation obs;
  obs.phi_vec = observation_vector(belief, env.human.stacked(), f.values);
  obs.known_contrib = known_contribution(belief, env.human.stacked(), f.values);
  obs.near_singular = f.near_singular;
  return obs;
}

Observation LinearModelAdapter::observe_virtual(const EnvState& env, const Vec4& x_h_next,
                                                const AgentState& robot_next,
                                                const BeliefState& belief) const {
  const FeatureVector f =
      features(AgentState::from_stacked(x_h_next), robot_next, env.human_goal);
  Observation obs;
  obs.phi_vec = observation_vector(belief, x_h_next, f.values);
  obs.known_contrib = known_contribution(belief, x_h_next, f.values);
  obs.near_singular = f.near_singular;
  return obs;
}

Mat24 RiskPreference::default_gain() {
  Mat24 k = Mat24::Zero();
  k.block<2, 2>(0, 0) = 1.0 * Mat2::Identity();
  k.block<2, 2>(0, 2) = 1.4 * Mat2::Identity();
  return k;
}

Vec2 risk_neutral(const RiskPreference& pref, const AgentState& robot,
                  const Vec2& robot_goal, const Vec2& bounds) {
  const Vec4 error = robot.stacked() - goal_state(robot_goal);
  return clip_control(-pref.feedback_gain * error, bounds);
}

double lookahead_cost(const Vec2& u_r, const EnvState& env, const BeliefState& belief,
                      const RobotDynamics& dyn, const HumanModelAdapter& model,
                      MatrixNorm norm) {
  // Step one is candidate-independent: predict the human from the belief mean
  // and advance the covariance with a zero-expectation innovation.
  const Observation obs = model.observe(env, belief);
  const PhiMatrix phi_k = build_phi_from_obs(obs.phi_vec, belief.n_state);
  const Prediction pred = predict_with_phi(belief, phi_k, obs.known_contrib);
  const BeliefState mid = covariance_update(belief, phi_k);

  // Step two: the candidate moves the robot, which moves the next observation.
  const AgentState robot_next = step_robot(dyn, env.robot, u_r);
  const Observation obs_next =
      model.observe_virtual(env, pred.x_hat_next, robot_next, belief);
  const PhiMatrix phi_next = build_phi_from_obs(obs_next.phi_vec, belief.n_state);
  const BeliefState out = covariance_update(mid, phi_next);

  return covariance_norm(out.sigma_tt, norm);
}

namespace {

int grid_side(int n_candidates) {
  const int side = static_cast<int>(std::lround(std::sqrt(double(n_candidates))));
  if (side < 2 || side * side != n_candidates) {
    throw ConfigError("risk_extremum: n_candidates must be a perfect square >= 4");
  }
  return side;
}

}  // namespace

ExploreChoice risk_extremum(const RiskPreference& pref, const EnvState& env,
                            const BeliefState& belief, const RobotDynamics& dyn,
                            const HumanModelAdapter& model) {
  if (pref.tag == RiskPreference::Kind::Neutral) {
    throw ConfigError("risk_extremum requires a Seeking or Averse preference");
  }
  const int side = grid_side(pref.n_candidates);
  const Vec2& b = dyn.control_bounds;

  std::vector<Vec2> candidates;
  candidates.reserve(pref.n_candidates + 1);
  for (int ix = 0; ix < side; ++ix) {
    for (int iy = 0; iy < side; ++iy) {
      const double ux = -b.x() + 2.0 * b.x() * ix / (side - 1);
      const double uy = -b.y() + 2.0 * b.y() * iy / (side - 1);
      candidates.emplace_back(ux, uy);
    }
  }
  candidates.push_back(risk_neutral(pref, env.robot, env.robot_goal, b));

  const bool seeking = pref.tag == RiskPreference::Kind::Seeking;

  ExploreChoice choice;
  choice.j_values.reserve(candidates.size());
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const Vec2& u : candidates) {
    const double j = lookahead_cost(u, env, belief, dyn, model, pref.norm);
    choice.j_values.push_back(j);
    const double goal_dist2 =
        (step_robot(dyn, env.robot, u).pos - env.robot_goal).squaredNorm();
    // Seeking maximizes the future covariance norm, averse minimizes it; the
    // optional goal bias pulls both toward the robot's goal.
    scores.push_back(seeking ? j - pref.goal_bias * goal_dist2
                             : j + pref.goal_bias * goal_dist2);
  }

  int best = 0;
  for (int i = 1; i < static_cast<int>(candidates.size()); ++i) {
    const double s = scores[i];
    const double sb = scores[best];
    if (s != sb) {
      if (seeking ? s > sb : s < sb) best = i;
      continue;
    }
    const double n = candidates[i].squaredNorm();
    const double nb = candidates[best].squaredNorm();
    if (n != nb) {
      if (n < nb) best = i;
      continue;
    }
    const Vec2& u = candidates[i];
    const Vec2& ub = candidates[best];
    if (u.x() < ub.x() || (u.x() == ub.x() && u.y() < ub.y())) best = i;
  }

  choice.u = candidates[best];
  choice.index = best;
  choice.j = choice.j_values[best];
  for (int i = 0; i < static_cast<int>(scores.size()); ++i) {
    if (i != best && scores[i] == scores[best]) {
      choice.tie_break = true;
      break;
    }
  }
  return choice;
}

}  // namespace hriex
