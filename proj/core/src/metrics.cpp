#include "hriex/metrics.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "hriex/errors.hpp"
#include "hriex/explore.hpp"

namespace hriex {

int count_interventions(const std::vector<StepRecord>& records) {
  return static_cast<int>(std::count_if(records.begin(), records.end(),
                                        [](const StepRecord& r) { return r.intervened; }));
}

Vec4 LinearFrozenPredictor::predict(const std::vector<StateTriple>& window) const {
  const StateTriple& now = window.back();
  const FeatureVector f = features(AgentState::from_stacked(now.human),
                                   AgentState::from_stacked(now.robot), now.goal);
  return model_.predict(now.human, f.values);
}

HeldOutSuite make_held_out_suite(std::uint64_t seed, int count, int horizon,
                                 const ScenarioConfig& base) {
  HeldOutSuite suite;
  suite.seed = seed;
  suite.rollout_horizon = horizon;
  suite.conditions.reserve(count);
  for (int i = 0; i < count; ++i) {
    ScenarioConfig c = randomized_scenario(base, derive_seed(seed, 0x5E00 + i));
    c.horizon = horizon;
    c.risk = RiskPreference::Kind::Neutral;
    c.safety.enabled = false;
    c.adaptation.enabled = false;
    suite.conditions.push_back(std::move(c));
  }
  return suite;
}

MaterializedSuite materialize_suite(const HeldOutSuite& suite) {
  MaterializedSuite out;
  out.rollouts.reserve(suite.conditions.size());
  out.next_human_states.reserve(suite.conditions.size());
  for (const ScenarioConfig& c : suite.conditions) {
    const PotentialFieldHuman human = c.human.build(c.ts);
    const RobotDynamics dyn = c.dynamics();
    const RiskPreference pref = c.preference();
    std::mt19937_64 rng(derive_seed(c.seed, 3));

    EnvState env{c.human_start, c.robot_start, c.human_goal_at(0), c.robot_goal, 0};
    std::vector<StateTriple> triples;
    std::vector<Vec4> nexts;
    triples.reserve(c.horizon);
    nexts.reserve(c.horizon);
    for (int k = 0; k < c.horizon; ++k) {
      env.human_goal = c.human_goal_at(k);
      triples.push_back({env.human.stacked(), env.robot.stacked(), env.human_goal});
      const AgentState human_next = step_human(human, env, rng);
      const Vec2 u = risk_neutral(pref, env.robot, env.robot_goal, c.control_bounds);
      env.robot = step_robot(dyn, env.robot, u);
      env.human = human_next;
      nexts.push_back(human_next.stacked());
    }
    out.rollouts.push_back(std::move(triples));
    out.next_human_states.push_back(std::move(nexts));
  }
  return out;
}

double held_out_error(const FrozenPredictor& predictor, const MaterializedSuite& suite) {
  if (suite.rollouts.empty()) {
    throw ConfigError("held_out_error: empty suite");
  }
  const int window_len = predictor.history_len() + 1;
  double total = 0.0;
  std::size_t steps = 0;
  std::vector<StateTriple> window;
  for (std::size_t r = 0; r < suite.rollouts.size(); ++r) {
    const auto& triples = suite.rollouts[r];
    const auto& nexts = suite.next_human_states[r];
    for (std::size_t k = 0; k < triples.size(); ++k) {
      window.clear();
      for (int w = window_len - 1; w >= 0; --w) {
        const std::size_t idx = (k >= static_cast<std::size_t>(w)) ? k - w : 0;
        window.push_back(triples[idx]);  // pad the start with the first triple
      }
      total += (nexts[k] - predictor.predict(window)).norm();
      ++steps;
    }
  }
  if (steps == 0) throw ConfigError("held_out_error: suite has zero steps");
  return total / static_cast<double>(steps);
}

InfluenceMap influence_map(const PotentialFieldHuman& human, const Vec2& human_pos,
                           double half_extent, double resolution) {
  PotentialFieldHuman noiseless = human;
  noiseless.noise_cov.setZero();

  InfluenceMap map;
  map.half_extent = half_extent;
  map.resolution = resolution;
  map.center = human_pos;
  const int n = static_cast<int>(std::floor(2.0 * half_extent / resolution)) + 1;
  map.field.resize(n, n);

  std::mt19937_64 unused_rng(0);  // noiseless path never draws
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      EnvState env;
      env.human = AgentState{human_pos, Vec2::Zero()};
      env.human_goal = human_pos;  // zero goal error isolates the robot's pull
      env.robot = AgentState{Vec2(map.x_at(i), map.y_at(j)), Vec2::Zero()};
      const AgentState next = step_human(noiseless, env, unused_rng);
      map.field(i, j) = (next.stacked() - env.human.stacked()).norm();
    }
  }
  return map;
}

double reachable_set_size(const SafeControlSet& set, const RobotDynamics& dyn,
                          const AgentState& robot, int n_controls, double grid_res,
                          std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(-dyn.control_bounds.x(), dyn.control_bounds.x());
  std::uniform_real_distribution<double> uy(-dyn.control_bounds.y(), dyn.control_bounds.y());

  // Grid cells are anchored at the absolute origin so that enlarging the safe
  // set can only add occupied cells.
  std::set<std::pair<long, long>> occupied;
  for (int i = 0; i < n_controls; ++i) {
    const Vec2 u(ux(rng), uy(rng));
    if ((set.L * u)(0) > set.S) continue;
    const AgentState next = step_robot(dyn, robot, u);
    occupied.emplace(static_cast<long>(std::floor(next.pos.x() / grid_res)),
                     static_cast<long>(std::floor(next.pos.y() / grid_res)));
  }
  return static_cast<double>(occupied.size()) * grid_res * grid_res;
}

}  // namespace hriex
