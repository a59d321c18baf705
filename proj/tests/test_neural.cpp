#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "hriex/errors.hpp"
#include "hriex/neural.hpp"
#include "test_support.hpp"

using namespace hriex;

namespace {

DatasetConfig small_dataset_config(int trajectories = 4, int steps = 100, int history = 3) {
  DatasetConfig d;
  d.n_trajectories = trajectories;
  d.trajectory_steps = steps;
  d.history_len = history;
  d.gamma = 50.0;
  d.seed = 7;
  d.scenario = test::basic_scenario(1);
  return d;
}

bool models_equal(const MlpModel& a, const MlpModel& b) {
  for (int l = 0; l < 4; ++l) {
    if (a.weights[l] != b.weights[l] || a.biases[l] != b.biases[l]) return false;
  }
  return a.input_mean == b.input_mean && a.input_std == b.input_std;
}

}  // namespace

TEST_CASE("window arithmetic: T steps and history N give T - N samples") {
  const TrajectoryDataset data = generate_dataset(small_dataset_config(1, 100, 3));
  CHECK(data.inputs.rows() == 97);
  CHECK(data.inputs.cols() == 4 * 10);
  CHECK(data.labels.rows() == 97);
}

TEST_CASE("labels are the simulator's next human state") {
  const TrajectoryDataset data = generate_dataset(small_dataset_config(2, 30, 3));
  int row = 0;
  for (const auto& triples : data.trajectories) {
    for (int k = 3; k + 1 < static_cast<int>(triples.size()); ++k) {
      CHECK(data.labels.row(row).transpose() == triples[k + 1].human);
      ++row;
    }
  }
}

TEST_CASE("dataset regeneration with the same seed is identical") {
  const TrajectoryDataset a = generate_dataset(small_dataset_config(3, 50, 3));
  const TrajectoryDataset b = generate_dataset(small_dataset_config(3, 50, 3));
  CHECK(a.inputs == b.inputs);
  CHECK(a.labels == b.labels);
}

TEST_CASE("training basics") {
  const TrajectoryDataset data = generate_dataset(small_dataset_config(8, 60, 3));
  SUBCASE("loss decreases over the first five epochs") {
    MlpModel model = MlpModel::initialized(static_cast<int>(data.inputs.cols()), 32, 3, 11);
    TrainConfig cfg;
    cfg.epochs = 5;
    const TrainReport report = train(model, data, cfg);
    REQUIRE(report.epoch_loss.size() == 5);
    for (std::size_t e = 1; e < report.epoch_loss.size(); ++e) {
      CHECK(report.epoch_loss[e] < report.epoch_loss[e - 1]);
    }
  }
  SUBCASE("zero epochs leave the model untouched") {
    MlpModel model = MlpModel::initialized(static_cast<int>(data.inputs.cols()), 16, 3, 11);
    const MlpModel before = model;
    TrainConfig cfg;
    cfg.epochs = 0;
    train(model, data, cfg);
    CHECK(models_equal(model, before));
  }
  SUBCASE("a 32-sample slice is overfit to MSE < 1e-4") {
    TrajectoryDataset slice = data;
    slice.inputs = data.inputs.topRows(32);
    slice.labels = data.labels.topRows(32);
    MlpModel model = MlpModel::initialized(static_cast<int>(data.inputs.cols()), 32, 3, 13);
    TrainConfig cfg;
    cfg.epochs = 2000;
    cfg.batch_size = 32;
    const TrainReport report = train(model, slice, cfg);
    double best = report.epoch_loss.back();
    for (double l : report.epoch_loss) best = std::min(best, l);
    CHECK(mse_loss(model, slice.inputs, slice.labels) < 1e-4);
  }
}

TEST_CASE("backprop matches central finite differences on probe parameters") {
  const TrajectoryDataset data = generate_dataset(small_dataset_config(1, 40, 3));
  const MatrixXd inputs = data.inputs.topRows(16);
  const MatrixXd labels = data.labels.topRows(16);
  MlpModel model = MlpModel::initialized(static_cast<int>(inputs.cols()), 8, 3, 17);
  model.input_mean = inputs.colwise().mean().transpose();
  model.input_std = VectorXd::Ones(inputs.cols());

  const Gradients grads = backprop(model, inputs, labels);
  const double h = 1e-6;
  // a probe across every layer, weights and biases
  const int probes[][3] = {{0, 2, 5}, {1, 3, 3}, {2, 7, 1}, {3, 2, 4}, {0, 0, 0}};
  for (const auto& p : probes) {
    const int l = p[0], r = p[1] % model.weights[p[0]].rows(),
              c = p[2] % model.weights[p[0]].cols();
    MlpModel hi = model, lo = model;
    hi.weights[l](r, c) += h;
    lo.weights[l](r, c) -= h;
    const double fd = (mse_loss(hi, inputs, labels) - mse_loss(lo, inputs, labels)) / (2 * h);
    CHECK(grads.d_weights[l](r, c) == doctest::Approx(fd).epsilon(1e-4));
  }
  for (int l = 0; l < 4; ++l) {
    MlpModel hi = model, lo = model;
    hi.biases[l](0) += h;
    lo.biases[l](0) -= h;
    const double fd = (mse_loss(hi, inputs, labels) - mse_loss(lo, inputs, labels)) / (2 * h);
    CHECK(grads.d_biases[l](0) == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("adaptation features") {
  const MlpModel model = MlpModel::initialized(40, 16, 3, 19);
  auto g = test::rng(20);
  SUBCASE("features are post-ReLU plus the constant, hence nonnegative") {
    for (int trial = 0; trial < 20; ++trial) {
      VectorXd window = VectorXd::NullaryExpr(40, [&]() { return test::uniform(g, -3, 3); });
      const VectorXd phi = nn_features(model, window);
      REQUIRE(phi.size() == 17);
      CHECK(phi.minCoeff() >= 0.0);
      CHECK(phi(16) == 1.0);
    }
  }
  SUBCASE("last layer applied to the features reproduces the network") {
    for (int trial = 0; trial < 20; ++trial) {
      VectorXd window = VectorXd::NullaryExpr(40, [&]() { return test::uniform(g, -3, 3); });
      const VectorXd phi = nn_features(model, window);
      const VectorXd theta = last_layer_theta(model);
      Vec4 via_theta;
      for (int i = 0; i < 4; ++i) via_theta(i) = theta.segment(i * 17, 17).dot(phi);
      CHECK((via_theta - model.forward(window)).norm() < 1e-10);
    }
  }
  SUBCASE("constant windows give constant features") {
    const VectorXd window = VectorXd::Constant(40, 0.7);
    CHECK(nn_features(model, window) == nn_features(model, window));
  }
}

TEST_CASE("model serialization round trip") {
  namespace fs = std::filesystem;
  const TrajectoryDataset data = generate_dataset(small_dataset_config(2, 40, 3));
  MlpModel model = MlpModel::initialized(static_cast<int>(data.inputs.cols()), 8, 3, 23);
  TrainConfig cfg;
  cfg.epochs = 2;
  train(model, data, cfg);

  const fs::path path = fs::temp_directory_path() / "hriex_model_roundtrip.json";
  model.save(path.string());
  const MlpModel loaded = MlpModel::load(path.string());
  fs::remove(path);
  CHECK(models_equal(model, loaded));
  CHECK(loaded.history_len == 3);
}

TEST_CASE("online last-layer adaptation") {
  // One trained model shared by the subcases (kept small for test speed).
  const DatasetConfig dcfg = small_dataset_config(40, 100, 3);
  const TrajectoryDataset data = generate_dataset(dcfg);
  MlpModel model = MlpModel::initialized(static_cast<int>(data.inputs.cols()), 32, 3, 29);
  TrainConfig tcfg;
  tcfg.epochs = 20;
  train(model, data, tcfg);

  auto episode_config = [&](std::uint64_t seed, double gamma, bool adapt) {
    ScenarioConfig c = randomized_scenario(test::basic_scenario(seed), seed);
    c.model_kind = ModelKind::Neural;
    c.nn_model_path = "unused";
    c.human.gamma = gamma;
    c.adaptation.enabled = adapt;
    c.adaptation.sigma0 = 0.1;
    c.horizon = 100;
    return c;
  };
  auto mean_error = [](const EpisodeResult& r, std::size_t from) {
    double sum = 0.0;
    for (std::size_t i = from; i < r.records.size(); ++i) sum += r.records[i].runtime_error;
    return sum / static_cast<double>(r.records.size() - from);
  };

  SUBCASE("matched distribution: adaptation does not hurt much") {
    double adapted = 0.0, frozen = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      adapted += mean_error(nn_adapt_episode(episode_config(seed, 50.0, true), model), 20);
      frozen += mean_error(nn_adapt_episode(episode_config(seed, 50.0, false), model), 20);
    }
    CHECK(adapted <= 2.5 * frozen + 0.02);
  }
  SUBCASE("shifted human: adaptation beats the frozen model") {
    int wins = 0;
    double adapted_total = 0.0, frozen_total = 0.0;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const double adapted =
          mean_error(nn_adapt_episode(episode_config(seed, 30.0, true), model), 80);
      const double frozen =
          mean_error(nn_adapt_episode(episode_config(seed, 30.0, false), model), 80);
      adapted_total += adapted;
      frozen_total += frozen;
      if (adapted < frozen) ++wins;
    }
    CHECK(adapted_total < frozen_total);
    CHECK(wins >= 4);
  }
}
