#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "hriex/config.hpp"
#include "hriex/episode.hpp"
#include "hriex/metrics.hpp"
#include "hriex/world.hpp"

namespace hriex {

/// Four affine layers with ReLU activations in between (last layer linear).
/// Inputs are flattened (history_len + 1)-step windows of (x_H, x_R, x_G),
/// standardized per dimension with the training-set statistics stored here.
struct MlpModel {
  std::vector<MatrixXd> weights;  // 4 layers, row-major [out x in]
  std::vector<VectorXd> biases;
  VectorXd input_mean;
  VectorXd input_std;
  int history_len = 3;

  int input_dim() const { return static_cast<int>(weights.front().cols()); }
  int hidden_dim() const { return static_cast<int>(weights.back().cols()); }

  VectorXd standardize(const VectorXd& raw) const;
  /// Post-ReLU activations of the third layer (the adaptation features,
  /// without the appended constant).
  VectorXd hidden(const VectorXd& raw_window) const;
  Vec4 forward(const VectorXd& raw_window) const;

  static MlpModel initialized(int input_dim, int hidden_width, int history_len,
                              std::uint64_t seed);
  void save(const std::string& path) const;
  static MlpModel load(const std::string& path);
};

VectorXd flatten_window(const std::vector<StateTriple>& window);

/// Adaptation observation: hidden activations with an appended 1.0 so the
/// output bias adapts together with the last-layer weights.
VectorXd nn_features(const MlpModel& model, const VectorXd& raw_window);

/// Last layer (weights and bias column) flattened row-wise into theta.
VectorXd last_layer_theta(const MlpModel& model);

struct DatasetConfig {
  int n_trajectories = 200;
  int trajectory_steps = 100;  // T; a trajectory stores T+1 sampled triples
  int history_len = 3;
  double gamma = 50.0;
  std::uint64_t seed = 7;
  ScenarioConfig scenario;  // arena, gains, noise; gamma above overrides
};

struct TrajectoryDataset {
  int history_len = 3;
  std::vector<std::vector<StateTriple>> trajectories;
  MatrixXd inputs;  // one window per row
  MatrixXd labels;  // next human state per row
};

/// Rolls the analytical human against a goal-directed robot (no safety filter,
/// no adaptation) from randomized crossing scenarios and windows the result.
TrajectoryDataset generate_dataset(const DatasetConfig& config);

struct TrainConfig {
  int epochs = 50;
  int batch_size = 64;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 11;
  double divergence_guard = 1e6;
};

struct TrainReport {
  std::vector<double> epoch_loss;  // mean MSE per epoch
};

struct Gradients {
  std::vector<MatrixXd> d_weights;
  std::vector<VectorXd> d_biases;
};

double mse_loss(const MlpModel& model, const MatrixXd& inputs, const MatrixXd& labels);
Gradients backprop(const MlpModel& model, const MatrixXd& inputs, const MatrixXd& labels);

/// Minibatch adaptive-moment optimization of the MSE loss. Computes and stores
/// the input standardization from the dataset before the first step. Throws
/// TrainingDivergedError past the divergence guard.
TrainReport train(MlpModel& model, const TrajectoryDataset& data, const TrainConfig& config);

/// Window-history adapter feeding the last-layer belief.
class NeuralModelAdapter final : public HumanModelAdapter {
 public:
  NeuralModelAdapter(const MlpModel& model, const EnvState& initial_env);

  Observation observe(const EnvState& env, const BeliefState& belief) const override;
  Observation observe_virtual(const EnvState& env, const Vec4& x_h_next,
                              const AgentState& robot_next,
                              const BeliefState& belief) const override;
  void push(const EnvState& env) override;

 private:
  const MlpModel* model_;
  std::deque<StateTriple> history_;  // most recent history_len past triples
};

BeliefState make_neural_belief(const MlpModel& model, const AdaptationConfig& adaptation,
                               const Mat4& noise_cov);

/// Closed loop with the network as the robot's human model: the last layer is
/// the adapted parameter block, everything else stays frozen.
EpisodeResult nn_adapt_episode(const ScenarioConfig& config, const MlpModel& model);

class NeuralFrozenPredictor final : public FrozenPredictor {
 public:
  NeuralFrozenPredictor(const MlpModel& model, VectorXd theta)
      : model_(&model), theta_(std::move(theta)) {}
  int history_len() const override { return model_->history_len; }
  Vec4 predict(const std::vector<StateTriple>& window) const override;

 private:
  const MlpModel* model_;
  VectorXd theta_;
};

}  // namespace hriex
