#include "hriex/neural.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "hriex/errors.hpp"
#include "hriex/explore.hpp"

namespace hriex {

using nlohmann::json;

namespace {

constexpr int kLayers = 4;
constexpr int kTripleDim = 10;  // 4 + 4 + 2

MatrixXd relu(const MatrixXd& z) { return z.cwiseMax(0.0); }

}  // namespace

VectorXd MlpModel::standardize(const VectorXd& raw) const {
  return (raw - input_mean).cwiseQuotient(input_std);
}

VectorXd MlpModel::hidden(const VectorXd& raw_window) const {
  VectorXd a = standardize(raw_window);
  for (int l = 0; l < kLayers - 1; ++l) {
    a = (weights[l] * a + biases[l]).cwiseMax(0.0);
  }
  return a;
}

Vec4 MlpModel::forward(const VectorXd& raw_window) const {
  return weights[kLayers - 1] * hidden(raw_window) + biases[kLayers - 1];
}

MlpModel MlpModel::initialized(int input_dim, int hidden_width, int history_len,
                               std::uint64_t seed) {
  MlpModel m;
  m.history_len = history_len;
  m.input_mean = VectorXd::Zero(input_dim);
  m.input_std = VectorXd::Ones(input_dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  const int dims[kLayers + 1] = {input_dim, hidden_width, hidden_width, hidden_width, 4};
  for (int l = 0; l < kLayers; ++l) {
    const int fan_in = dims[l];
    const double scale = std::sqrt(2.0 / fan_in);
    MatrixXd w(dims[l + 1], fan_in);
    for (int i = 0; i < w.rows(); ++i)
      for (int j = 0; j < w.cols(); ++j) w(i, j) = scale * unit(rng);
    m.weights.push_back(std::move(w));
    m.biases.push_back(VectorXd::Zero(dims[l + 1]));
  }
  return m;
}

VectorXd flatten_window(const std::vector<StateTriple>& window) {
  VectorXd flat(static_cast<int>(window.size()) * kTripleDim);
  int at = 0;
  for (const StateTriple& t : window) {
    flat.segment<4>(at) = t.human;
    flat.segment<4>(at + 4) = t.robot;
    flat.segment<2>(at + 8) = t.goal;
    at += kTripleDim;
  }
  return flat;
}

VectorXd nn_features(const MlpModel& model, const VectorXd& raw_window) {
  const VectorXd h = model.hidden(raw_window);
  VectorXd phi(h.size() + 1);
  phi << h, 1.0;
  return phi;
}

VectorXd last_layer_theta(const MlpModel& model) {
  const MatrixXd& w = model.weights.back();
  const VectorXd& b = model.biases.back();
  const int obs = static_cast<int>(w.cols()) + 1;
  VectorXd theta(4 * obs);
  for (int i = 0; i < 4; ++i) {
    theta.segment(i * obs, obs - 1) = w.row(i).transpose();
    theta(i * obs + obs - 1) = b(i);
  }
  return theta;
}

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

TrajectoryDataset generate_dataset(const DatasetConfig& cfg) {
  TrajectoryDataset data;
  data.history_len = cfg.history_len;

  ScenarioConfig base = cfg.scenario;
  base.human.gamma = cfg.gamma;
  base.horizon = cfg.trajectory_steps;

  for (int traj = 0; traj < cfg.n_trajectories; ++traj) {
    const ScenarioConfig c = randomized_scenario(base, derive_seed(cfg.seed, 0xDA7A + traj));
    const PotentialFieldHuman human = c.human.build(c.ts);
    const RobotDynamics dyn = c.dynamics();
    const RiskPreference pref = c.preference();
    std::mt19937_64 rng(derive_seed(c.seed, 1));

    EnvState env{c.human_start, c.robot_start, c.human_goal_at(0), c.robot_goal, 0};
    std::vector<StateTriple> triples;
    triples.reserve(cfg.trajectory_steps + 1);
    triples.push_back({env.human.stacked(), env.robot.stacked(), env.human_goal});
    for (int k = 0; k < cfg.trajectory_steps; ++k) {
      env.human_goal = c.human_goal_at(k);
      const AgentState human_next = step_human(human, env, rng);
      const Vec2 u = risk_neutral(pref, env.robot, env.robot_goal, c.control_bounds);
      env.robot = step_robot(dyn, env.robot, u);
      env.human = human_next;
      triples.push_back({env.human.stacked(), env.robot.stacked(), c.human_goal_at(k + 1)});
    }
    data.trajectories.push_back(std::move(triples));
  }

  // Window the trajectories: input covers steps k-N..k, label is step k+1.
  const int n = cfg.history_len;
  const int per_traj = cfg.trajectory_steps - n;
  const int input_dim = (n + 1) * kTripleDim;
  data.inputs.resize(per_traj * cfg.n_trajectories, input_dim);
  data.labels.resize(per_traj * cfg.n_trajectories, 4);
  int row = 0;
  for (const auto& triples : data.trajectories) {
    for (int k = n; k + 1 < static_cast<int>(triples.size()); ++k) {
      const std::vector<StateTriple> window(triples.begin() + (k - n),
                                            triples.begin() + (k + 1));
      data.inputs.row(row) = flatten_window(window).transpose();
      data.labels.row(row) = triples[k + 1].human.transpose();
      ++row;
    }
  }
  return data;
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

namespace {

struct ForwardPass {
  std::vector<MatrixXd> activations;  // a0 (standardized input) .. a3
  MatrixXd output;                    // 4 x batch
};

ForwardPass forward_batch(const MlpModel& m, const MatrixXd& raw_inputs) {
  ForwardPass fp;
  MatrixXd a = ((raw_inputs.rowwise() - m.input_mean.transpose()).array().rowwise() /
                m.input_std.transpose().array())
                   .transpose();  // in x batch
  fp.activations.push_back(a);
  for (int l = 0; l < kLayers - 1; ++l) {
    a = relu((m.weights[l] * a).colwise() + m.biases[l]);
    fp.activations.push_back(a);
  }
  fp.output = (m.weights[kLayers - 1] * a).colwise() + m.biases[kLayers - 1];
  return fp;
}

Gradients backprop_from_pass(const MlpModel& m, const ForwardPass& fp,
                             const MatrixXd& labels) {
  const auto batch = static_cast<double>(labels.rows());
  Gradients g;
  g.d_weights.resize(kLayers);
  g.d_biases.resize(kLayers);

  // d(loss)/d(output) for loss = mean over batch and output dims.
  MatrixXd delta = 2.0 * (fp.output - labels.transpose()) / (batch * 4.0);
  for (int l = kLayers - 1; l >= 0; --l) {
    g.d_weights[l] = delta * fp.activations[l].transpose();
    g.d_biases[l] = delta.rowwise().sum();
    if (l > 0) {
      delta = (m.weights[l].transpose() * delta).array() *
              (fp.activations[l].array() > 0.0).cast<double>();
    }
  }
  return g;
}

}  // namespace

double mse_loss(const MlpModel& model, const MatrixXd& inputs, const MatrixXd& labels) {
  const ForwardPass fp = forward_batch(model, inputs);
  return (fp.output - labels.transpose()).squaredNorm() /
         (static_cast<double>(labels.rows()) * 4.0);
}

Gradients backprop(const MlpModel& model, const MatrixXd& inputs, const MatrixXd& labels) {
  return backprop_from_pass(model, forward_batch(model, inputs), labels);
}

TrainReport train(MlpModel& model, const TrajectoryDataset& data, const TrainConfig& cfg) {
  if (data.inputs.rows() == 0 && cfg.epochs > 0) {
    throw ConfigError("train: empty dataset");
  }
  TrainReport report;
  if (cfg.epochs == 0) return report;

  // Standardization from the training set; floor keeps constant dims harmless.
  model.input_mean = data.inputs.colwise().mean().transpose();
  VectorXd var = ((data.inputs.rowwise() - model.input_mean.transpose()).array().square())
                     .colwise()
                     .mean()
                     .transpose();
  model.input_std = var.cwiseSqrt().cwiseMax(1e-8);

  Gradients m1, m2;
  for (int l = 0; l < kLayers; ++l) {
    m1.d_weights.push_back(MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
    m1.d_biases.push_back(VectorXd::Zero(model.biases[l].size()));
    m2.d_weights.push_back(MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
    m2.d_biases.push_back(VectorXd::Zero(model.biases[l].size()));
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<int> order(data.inputs.rows());
  std::iota(order.begin(), order.end(), 0);

  long step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    long seen = 0;
    for (std::size_t at = 0; at < order.size(); at += cfg.batch_size) {
      const int b = static_cast<int>(std::min<std::size_t>(cfg.batch_size, order.size() - at));
      MatrixXd batch_in(b, data.inputs.cols());
      MatrixXd batch_lab(b, 4);
      for (int i = 0; i < b; ++i) {
        batch_in.row(i) = data.inputs.row(order[at + i]);
        batch_lab.row(i) = data.labels.row(order[at + i]);
      }
      const ForwardPass fp = forward_batch(model, batch_in);
      const double loss =
          (fp.output - batch_lab.transpose()).squaredNorm() / (b * 4.0);
      if (!std::isfinite(loss) || loss > cfg.divergence_guard) {
        throw TrainingDivergedError("train: loss " + std::to_string(loss) + " at epoch " +
                                    std::to_string(epoch));
      }
      epoch_loss += loss * b;
      seen += b;

      const Gradients g = backprop_from_pass(model, fp, batch_lab);
      ++step;
      const double corr1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double corr2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      for (int l = 0; l < kLayers; ++l) {
        m1.d_weights[l] = cfg.beta1 * m1.d_weights[l] + (1.0 - cfg.beta1) * g.d_weights[l];
        m2.d_weights[l] = cfg.beta2 * m2.d_weights[l] +
                          (1.0 - cfg.beta2) * g.d_weights[l].array().square().matrix();
        model.weights[l] -=
            (cfg.learning_rate * (m1.d_weights[l] / corr1).array() /
             ((m2.d_weights[l] / corr2).array().sqrt() + cfg.eps))
                .matrix();
        m1.d_biases[l] = cfg.beta1 * m1.d_biases[l] + (1.0 - cfg.beta1) * g.d_biases[l];
        m2.d_biases[l] = cfg.beta2 * m2.d_biases[l] +
                         (1.0 - cfg.beta2) * g.d_biases[l].array().square().matrix();
        model.biases[l] -= (cfg.learning_rate * (m1.d_biases[l] / corr1).array() /
                            ((m2.d_biases[l] / corr2).array().sqrt() + cfg.eps))
                               .matrix();
      }
    }
    report.epoch_loss.push_back(epoch_loss / static_cast<double>(seen));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

json vec_to_json(const VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json mat_to_json(const MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

VectorXd vec_from_json(const json& j) {
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = j[i].get<double>();
  return v;
}

MatrixXd mat_from_json(const json& j) {
  const auto rows = j.size();
  const auto cols = rows ? j[0].size() : 0;
  MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) throw ConfigError("model file: ragged weight matrix");
    for (std::size_t k = 0; k < cols; ++k)
      m(static_cast<int>(i), static_cast<int>(k)) = j[i][k].get<double>();
  }
  return m;
}

}  // namespace

void MlpModel::save(const std::string& path) const {
  json j;
  j["schema_version"] = 1;
  j["kind"] = "mlp";
  j["history_len"] = history_len;
  j["input_mean"] = vec_to_json(input_mean);
  j["input_std"] = vec_to_json(input_std);
  j["layers"] = json::array();
  for (int l = 0; l < kLayers; ++l) {
    j["layers"].push_back({{"w", mat_to_json(weights[l])}, {"b", vec_to_json(biases[l])}});
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write model file: " + path);
  out << j.dump(1) << "\n";
}

MlpModel MlpModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read model file: " + path);
  json j = json::parse(in);
  if (j.value("kind", "") != "mlp") throw ConfigError("model file: unexpected kind");
  MlpModel m;
  m.history_len = j.at("history_len").get<int>();
  m.input_mean = vec_from_json(j.at("input_mean"));
  m.input_std = vec_from_json(j.at("input_std"));
  if (j.at("layers").size() != kLayers) throw ConfigError("model file: expected 4 layers");
  for (const auto& layer : j.at("layers")) {
    m.weights.push_back(mat_from_json(layer.at("w")));
    m.biases.push_back(vec_from_json(layer.at("b")));
  }
  if (m.weights.back().rows() != 4) throw ConfigError("model file: output dim must be 4");
  return m;
}

// ---------------------------------------------------------------------------
// Online adaptation plumbing
// ---------------------------------------------------------------------------

NeuralModelAdapter::NeuralModelAdapter(const MlpModel& model, const EnvState& initial_env)
    : model_(&model) {
  const StateTriple first{initial_env.human.stacked(), initial_env.robot.stacked(),
                          initial_env.human_goal};
  for (int i = 0; i < model.history_len; ++i) history_.push_back(first);
}

Observation NeuralModelAdapter::observe(const EnvState& env, const BeliefState&) const {
  std::vector<StateTriple> window(history_.begin(), history_.end());
  window.push_back({env.human.stacked(), env.robot.stacked(), env.human_goal});
  Observation obs;
  obs.phi_vec = nn_features(*model_, flatten_window(window));
  return obs;
}

Observation NeuralModelAdapter::observe_virtual(const EnvState& env, const Vec4& x_h_next,
                                                const AgentState& robot_next,
                                                const BeliefState&) const {
  std::vector<StateTriple> window(history_.begin(), history_.end());
  window.push_back({env.human.stacked(), env.robot.stacked(), env.human_goal});
  window.push_back({x_h_next, robot_next.stacked(), env.human_goal});
  window.erase(window.begin(), window.end() - (model_->history_len + 1));
  Observation obs;
  obs.phi_vec = nn_features(*model_, flatten_window(window));
  return obs;
}

void NeuralModelAdapter::push(const EnvState& env) {
  if (model_->history_len == 0) return;
  history_.push_back({env.human.stacked(), env.robot.stacked(), env.human_goal});
  history_.pop_front();
}

BeliefState make_neural_belief(const MlpModel& model, const AdaptationConfig& adaptation,
                               const Mat4& noise_cov) {
  BeliefState b;
  b.mode = UncertaintyMode::Full;
  b.forgetting = adaptation.forgetting;
  b.noise_cov = noise_cov;
  b.theta_hat = last_layer_theta(model);
  const int dim = b.dim_theta();
  b.F = adaptation.f0 * MatrixXd::Identity(dim, dim);
  b.sigma_tt = adaptation.sigma0 * MatrixXd::Identity(dim, dim);
  b.theta_err_mean = VectorXd::Zero(dim);
  b.dtheta = VectorXd::Constant(dim, adaptation.dtheta);
  return b;
}

EpisodeResult nn_adapt_episode(const ScenarioConfig& c, const MlpModel& model) {
  EnvState env0{c.human_start, c.robot_start, c.human_goal_at(0), c.robot_goal, 0};
  NeuralModelAdapter adapter(model, env0);
  return run_episode_core(c, adapter, make_neural_belief(model, c.adaptation, c.human.noise_cov()));
}

Vec4 NeuralFrozenPredictor::predict(const std::vector<StateTriple>& window) const {
  const VectorXd phi = nn_features(*model_, flatten_window(window));
  const int obs = static_cast<int>(phi.size());
  Vec4 out;
  for (int i = 0; i < 4; ++i) out(i) = theta_.segment(i * obs, obs).dot(phi);
  return out;
}

}  // namespace hriex
