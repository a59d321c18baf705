#pragma once

#include <vector>

#include "hriex/adapt.hpp"
#include "hriex/model_adapter.hpp"
#include "hriex/world.hpp"

namespace hriex {

/// Reference-control policy toward the robot's own predictive uncertainty.
struct RiskPreference {
  enum class Kind { Neutral, Seeking, Averse };
  Kind tag = Kind::Neutral;
  Mat24 feedback_gain = Mat24::Zero();  // state feedback for the goal controller
  int n_candidates = 25;                // perfect square; candidate grid size
  double goal_bias = 0.0;               // optional goal-progress weight
  MatrixNorm norm = MatrixNorm::Frobenius;

  static Mat24 default_gain();
};

/// Goal-directed state feedback: u = -K (x_R - goal), clipped to bounds.
Vec2 risk_neutral(const RiskPreference& pref, const AgentState& robot,
                  const Vec2& robot_goal, const Vec2& bounds);

/// Two-step lookahead: virtual covariance update at the current observation,
/// then a second one at the observation induced by applying u_r; returns the
/// norm of the resulting parameter covariance. Deterministic.
double lookahead_cost(const Vec2& u_r, const EnvState& env, const BeliefState& belief,
                      const RobotDynamics& dyn, const HumanModelAdapter& model,
                      MatrixNorm norm = MatrixNorm::Frobenius);

struct ExploreChoice {
  Vec2 u = Vec2::Zero();
  int index = -1;               // into j_values; the goal control is last
  double j = 0.0;               // lookahead cost of the chosen candidate
  bool tie_break = false;       // secondary criteria decided the winner
  std::vector<double> j_values; // cost of every candidate, grid order
};

/// Scores a deterministic grid over the control box plus the goal-directed
/// control. Seeking picks the candidate maximizing the two-step covariance
/// norm, Averse the one minimizing it; ties go to the smallest control norm,
/// then lexicographic order.
ExploreChoice risk_extremum(const RiskPreference& pref, const EnvState& env,
                            const BeliefState& belief, const RobotDynamics& dyn,
                            const HumanModelAdapter& model);

}  // namespace hriex
