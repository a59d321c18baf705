#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hriex/adapt.hpp"
#include "hriex/explore.hpp"
#include "hriex/human.hpp"
#include "hriex/safety.hpp"
#include "hriex/world.hpp"

namespace hriex {

struct HumanConfig {
  double gamma = 30.0;
  double k_p = 1.0;
  double k_d = 1.4;
  double k_r = 1.0;
  // Process-noise standard deviations (diagonal W).
  double noise_pos_std = 0.01;
  double noise_vel_std = 0.02;

  Mat4 noise_cov() const {
    Vec4 diag;
    diag << noise_pos_std * noise_pos_std, noise_pos_std * noise_pos_std,
        noise_vel_std * noise_vel_std, noise_vel_std * noise_vel_std;
    return diag.asDiagonal();
  }
  PotentialFieldHuman build(double ts) const {
    return PotentialFieldHuman::standard(gamma, ts, k_p, k_d, k_r, noise_cov());
  }
};

struct SafetyConfig {
  bool enabled = true;
  double d_min = 1.0;
  double k_phi = 1.0;
  double eta_R = 0.5;
  double lambda_0 = 0.01;

  SafetyIndexParams params(double ts) const { return {d_min, k_phi, eta_R, lambda_0, ts}; }
};

struct AdaptationConfig {
  bool enabled = true;
  double forgetting = 0.98;
  double f0 = 1.0;
  double sigma0 = 1.0;
  double dtheta = 0.0;
  double theta0_perturbation = 0.3;
  MatrixNorm norm = MatrixNorm::Frobenius;
};

struct GoalScheduleEntry {
  Vec2 goal = Vec2::Zero();
  int activation_step = 0;
};

struct ReachableSetConfig {
  bool enabled = false;
  int n_controls = 2000;
  double grid_res = 0.02;
};

/// Which representation the robot adapts: the linear-in-features model or the
/// last layer of a trained network. The simulated human itself is always the
/// potential-field model.
enum class ModelKind { Analytical, Neural };

struct ScenarioConfig {
  std::uint64_t seed = 0;
  int horizon = 100;
  double ts = 0.1;
  Vec2 control_bounds = Vec2(5.0, 5.0);

  RiskPreference::Kind risk = RiskPreference::Kind::Neutral;
  UncertaintyMode uncertainty = UncertaintyMode::Interactive;
  ModelKind model_kind = ModelKind::Analytical;

  HumanConfig human;
  SafetyConfig safety;
  AdaptationConfig adaptation;

  int n_candidates = 25;
  double goal_bias = 0.0;
  double neutral_kp = 1.0;
  double neutral_kd = 1.4;

  AgentState human_start;
  AgentState robot_start;
  Vec2 robot_goal = Vec2::Zero();
  std::vector<GoalScheduleEntry> goal_schedule;  // sorted by activation_step

  ReachableSetConfig reachable;
  std::string nn_model_path;  // Neural model kind only

  RobotDynamics dynamics() const {
    return RobotDynamics::double_integrator(ts, control_bounds);
  }
  RiskPreference preference() const {
    RiskPreference p;
    p.tag = risk;
    p.feedback_gain = Mat24::Zero();
    p.feedback_gain.block<2, 2>(0, 0) = neutral_kp * Mat2::Identity();
    p.feedback_gain.block<2, 2>(0, 2) = neutral_kd * Mat2::Identity();
    p.n_candidates = n_candidates;
    p.goal_bias = goal_bias;
    p.norm = adaptation.norm;
    return p;
  }
  Vec2 human_goal_at(int step) const;
};

/// Throws ConfigError with a description of the first violated constraint.
void validate(const ScenarioConfig& config);

/// Deterministic sub-stream seeds for the independent RNG consumers.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Crossing scenario: the human walks left to right (goal switch sends it
/// back), the robot crosses bottom to top. Start/goal coordinates are drawn
/// from bands so the two paths generically intersect near the center.
ScenarioConfig randomized_scenario(const ScenarioConfig& base, std::uint64_t seed);

}  // namespace hriex
