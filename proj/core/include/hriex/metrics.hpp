#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hriex/config.hpp"
#include "hriex/human.hpp"
#include "hriex/safety.hpp"
#include "hriex/world.hpp"

namespace hriex {

/// Per-timestep log row. The env snapshot is taken before the step executes;
/// runtime_error compares the realized next human state with the prediction
/// made from that snapshot.
struct StepRecord {
  int k = 0;
  EnvState env;
  Vec2 u_ref = Vec2::Zero();
  Vec2 u_safe = Vec2::Zero();
  bool intervened = false;
  bool infeasible = false;
  bool near_singular = false;
  bool tie_break = false;
  double phi = 0.0;
  double phi0 = 0.0;
  double lambda_sea = 0.0;
  double runtime_error = 0.0;
  double cov_norm = 0.0;
  double reachable_area = std::numeric_limits<double>::quiet_NaN();
  int chosen_index = -1;
  std::vector<double> j_values;  // empty unless exploring
};

int count_interventions(const std::vector<StepRecord>& records);

/// 1-step predictor of the human evaluated on frozen parameters. The window's
/// last element is the current triple; implementations that need no history
/// report history_len() == 0 and read only window.back().
class FrozenPredictor {
 public:
  virtual ~FrozenPredictor() = default;
  virtual int history_len() const { return 0; }
  virtual Vec4 predict(const std::vector<StateTriple>& window) const = 0;
};

class LinearFrozenPredictor final : public FrozenPredictor {
 public:
  explicit LinearFrozenPredictor(const LinearHumanModel& model) : model_(model) {}
  Vec4 predict(const std::vector<StateTriple>& window) const override;

 private:
  LinearHumanModel model_;
};

/// Fixed battery of initial conditions for the held-out error: rollouts where
/// both agents run goal-focused control and the evaluated model is frozen.
struct HeldOutSuite {
  std::vector<ScenarioConfig> conditions;
  int rollout_horizon = 100;
  std::uint64_t seed = 0;
};

HeldOutSuite make_held_out_suite(std::uint64_t seed, int count, int horizon,
                                 const ScenarioConfig& base);

/// Pre-simulated suite trajectories (they do not depend on the evaluated
/// model, so they are shared across every compared controller).
struct MaterializedSuite {
  std::vector<std::vector<StateTriple>> rollouts;      // triples per step
  std::vector<std::vector<Vec4>> next_human_states;    // aligned labels
};

MaterializedSuite materialize_suite(const HeldOutSuite& suite);

/// Mean 1-step prediction error of the frozen predictor over every suite step.
/// Throws ConfigError on an empty suite.
double held_out_error(const FrozenPredictor& predictor, const MaterializedSuite& suite);

/// Displacement field: full-state change of a resting human over one noiseless
/// step with zero goal error, as a function of the robot's position.
struct InfluenceMap {
  double half_extent = 3.0;
  double resolution = 0.05;
  Vec2 center = Vec2::Zero();
  Eigen::MatrixXd field;  // field(i, j) at x = center.x - half_extent + i*res, y likewise

  double x_at(int i) const { return center.x() - half_extent + i * resolution; }
  double y_at(int j) const { return center.y() - half_extent + j * resolution; }
};

InfluenceMap influence_map(const PotentialFieldHuman& human, const Vec2& human_pos,
                           double half_extent, double resolution);

/// Monte-Carlo area of the 1-step reachable positions under safe control:
/// sample controls in the box, keep members of the safe set, push them through
/// the dynamics and rasterize the resulting positions on a fixed-origin grid.
/// Returns 0 when no sampled control is safe.
double reachable_set_size(const SafeControlSet& set, const RobotDynamics& dyn,
                          const AgentState& robot, int n_controls, double grid_res,
                          std::mt19937_64& rng);

}  // namespace hriex
