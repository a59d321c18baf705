#pragma once

#include <vector>

#include "hriex/adapt.hpp"
#include "hriex/config.hpp"
#include "hriex/metrics.hpp"
#include "hriex/model_adapter.hpp"

namespace hriex {

struct EpisodeResult {
  std::vector<StepRecord> records;
  BeliefState final_belief;
  std::vector<VectorXd> theta_history;  // theta_hat after each step's update
};

/// Closed loop: reference controller -> safety monitor -> robot step, the
/// ground-truth human step, then the belief update. Deterministic for a fixed
/// config (the seed derives independent streams for process noise, the initial
/// parameter perturbation, and metric sampling).
EpisodeResult run_episode_core(const ScenarioConfig& config, HumanModelAdapter& adapter,
                               BeliefState belief);

/// Analytical path: belief over the linear-in-features human model.
EpisodeResult run_episode(const ScenarioConfig& config);

/// Belief the analytical episode starts from (exposed for evaluation code).
BeliefState initial_linear_belief(const ScenarioConfig& config);

}  // namespace hriex
