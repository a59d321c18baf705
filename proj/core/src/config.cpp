#include "hriex/config.hpp"

#include <algorithm>
#include <cmath>

#include "hriex/errors.hpp"

namespace hriex {

Vec2 ScenarioConfig::human_goal_at(int step) const {
  if (goal_schedule.empty()) {
    throw ConfigError("scenario has an empty goal schedule");
  }
  Vec2 goal = goal_schedule.front().goal;
  for (const auto& entry : goal_schedule) {
    if (entry.activation_step <= step) goal = entry.goal;
  }
  return goal;
}

void validate(const ScenarioConfig& c) {
  if (c.ts <= 0.0) throw ConfigError("ts must be positive");
  if (c.horizon < 0) throw ConfigError("horizon must be >= 0");
  if (c.control_bounds.minCoeff() <= 0.0) throw ConfigError("control bounds must be positive");
  if (!c.human_start.finite() || !c.robot_start.finite()) {
    throw ConfigError("initial states must be finite");
  }
  if (!c.robot_goal.allFinite()) throw ConfigError("robot goal must be finite");
  if (c.goal_schedule.empty()) throw ConfigError("goal schedule must not be empty");
  for (const auto& entry : c.goal_schedule) {
    if (!entry.goal.allFinite()) throw ConfigError("human goal must be finite");
  }
  if (!std::is_sorted(c.goal_schedule.begin(), c.goal_schedule.end(),
                      [](const GoalScheduleEntry& a, const GoalScheduleEntry& b) {
                        return a.activation_step < b.activation_step;
                      })) {
    throw ConfigError("goal schedule must be sorted by activation step");
  }
  if (c.human.gamma < 0.0) throw ConfigError("gamma must be >= 0");
  if (c.human.noise_pos_std < 0.0 || c.human.noise_vel_std < 0.0) {
    throw ConfigError("noise standard deviations must be >= 0");
  }
  if (c.safety.d_min <= 0.0) throw ConfigError("d_min must be positive");
  if (c.safety.k_phi <= 0.0) throw ConfigError("k_phi must be positive");
  if (c.safety.eta_R <= 0.0) throw ConfigError("eta_R must be positive");
  if (c.safety.lambda_0 < 0.0) throw ConfigError("lambda_0 must be >= 0");
  if (c.adaptation.forgetting <= 0.0 || c.adaptation.forgetting > 1.0) {
    throw ConfigError("forgetting factor must be in (0, 1]");
  }
  if (c.adaptation.f0 <= 0.0) throw ConfigError("f0 must be positive");
  if (c.adaptation.sigma0 < 0.0) throw ConfigError("sigma0 must be >= 0");
  if (c.adaptation.theta0_perturbation < 0.0) {
    throw ConfigError("theta0_perturbation must be >= 0");
  }
  const int side = static_cast<int>(std::lround(std::sqrt(double(c.n_candidates))));
  if (side < 2 || side * side != c.n_candidates) {
    throw ConfigError("n_candidates must be a perfect square >= 4");
  }
  if (c.model_kind == ModelKind::Neural && c.nn_model_path.empty()) {
    throw ConfigError("neural model kind requires nn_model_path");
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over (seed, stream); decorrelates the per-consumer streams.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ScenarioConfig randomized_scenario(const ScenarioConfig& base, std::uint64_t seed) {
  ScenarioConfig c = base;
  c.seed = seed;
  std::mt19937_64 rng(derive_seed(seed, 0xC0));
  std::uniform_real_distribution<double> band(3.5, 4.5);
  std::uniform_real_distribution<double> lane(-3.0, 3.0);

  for (int attempt = 0; attempt < 64; ++attempt) {
    c.human_start = AgentState{Vec2(-band(rng), lane(rng)), Vec2::Zero()};
    const Vec2 human_goal_1(band(rng), lane(rng));
    const Vec2 human_goal_2(-band(rng), lane(rng));
    c.robot_start = AgentState{Vec2(lane(rng), -band(rng)), Vec2::Zero()};
    c.robot_goal = Vec2(lane(rng), band(rng));
    c.goal_schedule = {{human_goal_1, 0}, {human_goal_2, c.horizon / 2}};
    const double separation = (c.human_start.pos - c.robot_start.pos).norm();
    if (separation > 1.5 * c.safety.d_min) break;
  }
  return c;
}

}  // namespace hriex
