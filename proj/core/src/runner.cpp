#include "hriex/runner.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "hriex/csv.hpp"
#include "hriex/episode.hpp"
#include "hriex/errors.hpp"
#include "hriex/neural.hpp"

namespace hriex {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Config file schema
// ---------------------------------------------------------------------------

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError(where + ": unknown key \"" + item.key() + "\"");
  }
}

double get_num(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError(std::string(key) + ": expected a number");
  return obj[key].get<double>();
}

bool get_bool(const json& obj, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) throw ConfigError(std::string(key) + ": expected a boolean");
  return obj[key].get<bool>();
}

RiskPreference::Kind parse_risk(const std::string& name) {
  if (name == "neutral") return RiskPreference::Kind::Neutral;
  if (name == "seeking") return RiskPreference::Kind::Seeking;
  if (name == "averse") return RiskPreference::Kind::Averse;
  throw ConfigError("unknown risk preference \"" + name + "\"");
}

const char* risk_name(RiskPreference::Kind kind) {
  switch (kind) {
    case RiskPreference::Kind::Neutral: return "neutral";
    case RiskPreference::Kind::Seeking: return "seeking";
    case RiskPreference::Kind::Averse: return "averse";
  }
  return "?";
}

struct ModeSpec {
  UncertaintyMode uncertainty;
  ModelKind model_kind;
  const char* name;
};

ModeSpec parse_mode(const std::string& name) {
  if (name == "intrinsic") return {UncertaintyMode::Intrinsic, ModelKind::Analytical, "intrinsic"};
  if (name == "interactive")
    return {UncertaintyMode::Interactive, ModelKind::Analytical, "interactive"};
  if (name == "full") return {UncertaintyMode::Full, ModelKind::Analytical, "full"};
  if (name == "neural") return {UncertaintyMode::Full, ModelKind::Neural, "neural"};
  throw ConfigError("unknown uncertainty mode \"" + name + "\"");
}

struct HeldOutConfig {
  bool enabled = true;
  int count = 10;
  int horizon = 100;
  std::uint64_t seed = 9001;
  int stride = 1;  // evaluate the model snapshot every stride steps
};

struct RunFile {
  ScenarioConfig scenario;
  std::vector<GridCell> cells;
  int seeds = 10;
  std::uint64_t base_seed = 1;
  HeldOutConfig held_out;
  // train-nn section
  std::optional<DatasetConfig> dataset;
  TrainConfig train;
  int hidden_width = 32;
};

ScenarioConfig parse_scenario(const json& s) {
  check_keys(s, "scenario",
             {"horizon", "ts", "control_bounds", "human", "safety", "adaptation", "explore",
              "nn_model_path"});
  ScenarioConfig c;
  c.horizon = static_cast<int>(get_num(s, "horizon", c.horizon));
  c.ts = get_num(s, "ts", c.ts);
  if (s.contains("control_bounds")) {
    const auto& b = s["control_bounds"];
    if (!b.is_array() || b.size() != 2) throw ConfigError("control_bounds: expected [bx, by]");
    c.control_bounds = Vec2(b[0].get<double>(), b[1].get<double>());
  }
  if (s.contains("human")) {
    const json& h = s["human"];
    check_keys(h, "scenario.human",
               {"gamma", "k_p", "k_d", "k_r", "noise_pos_std", "noise_vel_std"});
    c.human.gamma = get_num(h, "gamma", c.human.gamma);
    c.human.k_p = get_num(h, "k_p", c.human.k_p);
    c.human.k_d = get_num(h, "k_d", c.human.k_d);
    c.human.k_r = get_num(h, "k_r", c.human.k_r);
    c.human.noise_pos_std = get_num(h, "noise_pos_std", c.human.noise_pos_std);
    c.human.noise_vel_std = get_num(h, "noise_vel_std", c.human.noise_vel_std);
  }
  if (s.contains("safety")) {
    const json& f = s["safety"];
    check_keys(f, "scenario.safety", {"enabled", "d_min", "k_phi", "eta_R", "lambda_0"});
    c.safety.enabled = get_bool(f, "enabled", c.safety.enabled);
    c.safety.d_min = get_num(f, "d_min", c.safety.d_min);
    c.safety.k_phi = get_num(f, "k_phi", c.safety.k_phi);
    c.safety.eta_R = get_num(f, "eta_R", c.safety.eta_R);
    c.safety.lambda_0 = get_num(f, "lambda_0", c.safety.lambda_0);
  }
  if (s.contains("adaptation")) {
    const json& a = s["adaptation"];
    check_keys(a, "scenario.adaptation",
               {"enabled", "forgetting", "f0", "sigma0", "dtheta", "theta0_perturbation",
                "norm"});
    c.adaptation.enabled = get_bool(a, "enabled", c.adaptation.enabled);
    c.adaptation.forgetting = get_num(a, "forgetting", c.adaptation.forgetting);
    c.adaptation.f0 = get_num(a, "f0", c.adaptation.f0);
    c.adaptation.sigma0 = get_num(a, "sigma0", c.adaptation.sigma0);
    c.adaptation.dtheta = get_num(a, "dtheta", c.adaptation.dtheta);
    c.adaptation.theta0_perturbation =
        get_num(a, "theta0_perturbation", c.adaptation.theta0_perturbation);
    if (a.contains("norm")) {
      const std::string n = a["norm"].get<std::string>();
      if (n == "frobenius")
        c.adaptation.norm = MatrixNorm::Frobenius;
      else if (n == "spectral")
        c.adaptation.norm = MatrixNorm::Spectral;
      else
        throw ConfigError("adaptation.norm: expected \"frobenius\" or \"spectral\"");
    }
  }
  if (s.contains("explore")) {
    const json& e = s["explore"];
    check_keys(e, "scenario.explore", {"n_candidates", "goal_bias", "neutral_kp", "neutral_kd"});
    c.n_candidates = static_cast<int>(get_num(e, "n_candidates", c.n_candidates));
    c.goal_bias = get_num(e, "goal_bias", c.goal_bias);
    c.neutral_kp = get_num(e, "neutral_kp", c.neutral_kp);
    c.neutral_kd = get_num(e, "neutral_kd", c.neutral_kd);
  }
  if (s.contains("nn_model_path")) c.nn_model_path = s["nn_model_path"].get<std::string>();
  return c;
}

RunFile parse_run_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }

  check_keys(j, path,
             {"schema_version", "scenario", "grid", "seeds", "base_seed", "metrics", "train"});
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1) {
    throw ConfigError(path + ": schema_version 1 required");
  }

  RunFile run;
  if (j.contains("scenario")) run.scenario = parse_scenario(j["scenario"]);
  run.seeds = static_cast<int>(get_num(j, "seeds", run.seeds));
  run.base_seed = static_cast<std::uint64_t>(get_num(j, "base_seed", 1.0));
  if (run.seeds < 0) throw ConfigError("seeds must be >= 0");

  if (j.contains("grid")) {
    const json& g = j["grid"];
    check_keys(g, "grid", {"risk_preferences", "uncertainty_modes", "safety", "gammas"});
    std::vector<RiskPreference::Kind> risks;
    for (const auto& r : g.value("risk_preferences", json::array()))
      risks.push_back(parse_risk(r.get<std::string>()));
    std::vector<ModeSpec> modes;
    for (const auto& m : g.value("uncertainty_modes", json::array()))
      modes.push_back(parse_mode(m.get<std::string>()));
    std::vector<bool> safeties;
    for (const auto& s : g.value("safety", json::array())) safeties.push_back(s.get<bool>());
    if (safeties.empty()) safeties.push_back(run.scenario.safety.enabled);
    std::vector<double> gammas;
    for (const auto& gm : g.value("gammas", json::array())) gammas.push_back(gm.get<double>());
    if (gammas.empty()) gammas.push_back(run.scenario.human.gamma);

    for (const ModeSpec& mode : modes) {
      for (const RiskPreference::Kind risk : risks) {
        for (const bool safe : safeties) {
          for (const double gamma : gammas) {
            GridCell cell;
            cell.risk = risk;
            cell.uncertainty = mode.uncertainty;
            cell.model_kind = mode.model_kind;
            cell.safety_enabled = safe;
            cell.gamma = gamma;
            std::ostringstream id;
            id << mode.name << '-' << risk_name(risk) << '-' << (safe ? "safe" : "unsafe");
            if (gammas.size() > 1) id << "-g" << gamma;
            cell.id = id.str();
            run.cells.push_back(cell);
          }
        }
      }
    }
  }

  if (j.contains("metrics")) {
    const json& m = j["metrics"];
    check_keys(m, "metrics", {"held_out", "reachable_set"});
    if (m.contains("held_out")) {
      const json& h = m["held_out"];
      check_keys(h, "metrics.held_out", {"enabled", "count", "horizon", "seed", "stride"});
      run.held_out.enabled = get_bool(h, "enabled", run.held_out.enabled);
      run.held_out.count = static_cast<int>(get_num(h, "count", run.held_out.count));
      run.held_out.horizon = static_cast<int>(get_num(h, "horizon", run.held_out.horizon));
      run.held_out.seed = static_cast<std::uint64_t>(get_num(h, "seed", 9001.0));
      run.held_out.stride = static_cast<int>(get_num(h, "stride", run.held_out.stride));
      if (run.held_out.stride < 1) throw ConfigError("metrics.held_out.stride must be >= 1");
    }
    if (m.contains("reachable_set")) {
      const json& r = m["reachable_set"];
      check_keys(r, "metrics.reachable_set", {"enabled", "n_controls", "grid_res"});
      run.scenario.reachable.enabled = get_bool(r, "enabled", false);
      run.scenario.reachable.n_controls =
          static_cast<int>(get_num(r, "n_controls", run.scenario.reachable.n_controls));
      run.scenario.reachable.grid_res =
          get_num(r, "grid_res", run.scenario.reachable.grid_res);
    }
  }

  if (j.contains("train")) {
    const json& t = j["train"];
    check_keys(t, "train",
               {"n_trajectories", "trajectory_steps", "history_len", "gamma", "hidden_width",
                "epochs", "batch_size", "learning_rate", "seed"});
    DatasetConfig d;
    d.scenario = run.scenario;
    d.n_trajectories = static_cast<int>(get_num(t, "n_trajectories", d.n_trajectories));
    d.trajectory_steps = static_cast<int>(get_num(t, "trajectory_steps", d.trajectory_steps));
    d.history_len = static_cast<int>(get_num(t, "history_len", d.history_len));
    d.gamma = get_num(t, "gamma", d.gamma);
    d.seed = static_cast<std::uint64_t>(get_num(t, "seed", 7.0));
    run.dataset = d;
    run.hidden_width = static_cast<int>(get_num(t, "hidden_width", run.hidden_width));
    run.train.epochs = static_cast<int>(get_num(t, "epochs", run.train.epochs));
    run.train.batch_size = static_cast<int>(get_num(t, "batch_size", run.train.batch_size));
    run.train.learning_rate = get_num(t, "learning_rate", run.train.learning_rate);
    run.train.seed = static_cast<std::uint64_t>(get_num(t, "seed", 11.0));
  }
  return run;
}

// ---------------------------------------------------------------------------
// Cell execution
// ---------------------------------------------------------------------------

struct CellOutcome {
  GridCell cell;
  int episodes = 0;
  int failed = 0;
  long infeasible_steps = 0;
  std::vector<double> interventions;   // per seed
  std::vector<double> final_heldout;   // per seed
  std::vector<double> mean_reachable;  // per seed
  // per-step series across seeds, for curves.csv
  std::vector<std::vector<double>> runtime_by_step;
  std::vector<std::vector<double>> covnorm_by_step;
  std::vector<std::vector<double>> heldout_by_step;
  std::vector<std::vector<double>> reachable_by_step;
};

ScenarioConfig cell_scenario(const RunFile& run, const GridCell& cell, std::uint64_t seed) {
  ScenarioConfig base = run.scenario;
  base.risk = cell.risk;
  base.uncertainty = cell.uncertainty;
  base.model_kind = cell.model_kind;
  base.safety.enabled = cell.safety_enabled;
  base.human.gamma = cell.gamma;
  return randomized_scenario(base, seed);
}

std::vector<double> heldout_curve(const RunFile& run, const ScenarioConfig& c,
                                  const EpisodeResult& result,
                                  const MaterializedSuite& suite, const MlpModel* model) {
  std::vector<double> curve(result.records.size(),
                            std::numeric_limits<double>::quiet_NaN());
  if (!run.held_out.enabled) return curve;
  BeliefState belief_template =
      c.model_kind == ModelKind::Analytical ? initial_linear_belief(c) : BeliefState{};
  for (std::size_t k = 0; k < result.records.size(); ++k) {
    const bool last = k + 1 == result.records.size();
    if (!last && (static_cast<int>(k + 1) % run.held_out.stride) != 0) continue;
    if (c.model_kind == ModelKind::Analytical) {
      belief_template.theta_hat = result.theta_history[k];
      LinearFrozenPredictor predictor(model_from_belief(belief_template));
      curve[k] = held_out_error(predictor, suite);
    } else {
      NeuralFrozenPredictor predictor(*model, result.theta_history[k]);
      curve[k] = held_out_error(predictor, suite);
    }
  }
  return curve;
}

CellOutcome run_cell(const RunFile& run, const GridCell& cell, const fs::path& out_dir,
                     std::uint64_t seed_offset, const MaterializedSuite* suite,
                     const MlpModel* model) {
  CellOutcome outcome;
  outcome.cell = cell;
  const fs::path cell_dir = out_dir / cell.id;
  fs::create_directories(cell_dir);

  for (int i = 0; i < run.seeds; ++i) {
    const std::uint64_t seed = run.base_seed + seed_offset + static_cast<std::uint64_t>(i);
    const ScenarioConfig c = cell_scenario(run, cell, seed);
    ++outcome.episodes;
    try {
      const EpisodeResult result = c.model_kind == ModelKind::Analytical
                                       ? run_episode(c)
                                       : nn_adapt_episode(c, *model);
      std::vector<double> heldout(result.records.size(),
                                  std::numeric_limits<double>::quiet_NaN());
      if (run.held_out.enabled && suite != nullptr) {
        heldout = heldout_curve(run, c, result, *suite, model);
        if (!heldout.empty()) outcome.final_heldout.push_back(heldout.back());
      }
      write_episode_csv((cell_dir / ("episode-" + std::to_string(seed) + ".csv")).string(),
                        result.records, heldout);

      outcome.interventions.push_back(count_interventions(result.records));
      std::vector<double> reach;
      for (std::size_t k = 0; k < result.records.size(); ++k) {
        const StepRecord& r = result.records[k];
        if (outcome.runtime_by_step.size() <= k) {
          outcome.runtime_by_step.emplace_back();
          outcome.covnorm_by_step.emplace_back();
          outcome.heldout_by_step.emplace_back();
          outcome.reachable_by_step.emplace_back();
        }
        outcome.runtime_by_step[k].push_back(r.runtime_error);
        outcome.covnorm_by_step[k].push_back(r.cov_norm);
        if (std::isfinite(heldout[k])) outcome.heldout_by_step[k].push_back(heldout[k]);
        if (std::isfinite(r.reachable_area)) {
          outcome.reachable_by_step[k].push_back(r.reachable_area);
          reach.push_back(r.reachable_area);
        }
        if (r.infeasible) ++outcome.infeasible_steps;
      }
      if (!reach.empty()) outcome.mean_reachable.push_back(series_stats(reach).mean);
    } catch (const NumericalError&) {
      ++outcome.failed;
    }
  }
  return outcome;
}

void write_curves(const fs::path& cell_dir, const CellOutcome& o) {
  std::ofstream out(cell_dir / "curves.csv");
  out << "k,runtime_mean,runtime_se,covnorm_mean,covnorm_se,heldout_mean,heldout_se,"
         "reachable_mean,reachable_se\n";
  for (std::size_t k = 0; k < o.runtime_by_step.size(); ++k) {
    const SeriesStats rt = series_stats(o.runtime_by_step[k]);
    const SeriesStats cv = series_stats(o.covnorm_by_step[k]);
    const SeriesStats ho = series_stats(o.heldout_by_step[k]);
    const SeriesStats re = series_stats(o.reachable_by_step[k]);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out << k << ',' << format_double(rt.mean) << ',' << format_double(rt.stderr_) << ','
        << format_double(cv.mean) << ',' << format_double(cv.stderr_) << ','
        << format_double(ho.n ? ho.mean : nan) << ','
        << format_double(ho.n ? ho.stderr_ : nan) << ','
        << format_double(re.n ? re.mean : nan) << ','
        << format_double(re.n ? re.stderr_ : nan) << "\n";
  }
}

}  // namespace

int run_matrix(const MatrixOptions& options, std::ostream& log) {
  RunFile run;
  try {
    run = parse_run_file(options.config_path);
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    fs::create_directories(options.out_dir);

    // The held-out suite is shared by every cell with the same gamma.
    std::map<double, MaterializedSuite> suites;
    if (run.held_out.enabled) {
      for (const GridCell& cell : run.cells) {
        if (suites.count(cell.gamma)) continue;
        ScenarioConfig base = run.scenario;
        base.human.gamma = cell.gamma;
        suites.emplace(cell.gamma,
                       materialize_suite(make_held_out_suite(
                           run.held_out.seed, run.held_out.count, run.held_out.horizon, base)));
      }
    }

    std::optional<MlpModel> model;
    for (const GridCell& cell : run.cells) {
      if (cell.model_kind == ModelKind::Neural && !model.has_value()) {
        if (run.scenario.nn_model_path.empty()) {
          throw ConfigError("grid contains neural cells but scenario.nn_model_path is unset");
        }
        model = MlpModel::load(run.scenario.nn_model_path);
      }
    }

    std::vector<CellOutcome> outcomes(run.cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    const int jobs = std::max(1, options.jobs);
    auto worker = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= run.cells.size()) return;
        const GridCell& cell = run.cells[i];
        const MaterializedSuite* suite =
            run.held_out.enabled ? &suites.at(cell.gamma) : nullptr;
        outcomes[i] = run_cell(run, cell, options.out_dir, options.seed_offset, suite,
                               model ? &*model : nullptr);
        write_curves(fs::path(options.out_dir) / cell.id, outcomes[i]);
        std::lock_guard<std::mutex> lock(log_mutex);
        log << "cell " << cell.id << ": " << outcomes[i].episodes << " episodes";
        if (outcomes[i].failed) log << " (" << outcomes[i].failed << " failed)";
        log << "\n";
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::ofstream summary(fs::path(options.out_dir) / "summary.csv");
    summary << "cell,episodes,failed,interventions_mean,interventions_sd,"
               "final_heldout_mean,final_heldout_se,mean_reachable_area,infeasible_steps\n";
    for (const CellOutcome& o : outcomes) {
      const SeriesStats iv = series_stats(o.interventions);
      const SeriesStats ho = series_stats(o.final_heldout);
      const SeriesStats re = series_stats(o.mean_reachable);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      summary << o.cell.id << ',' << o.episodes << ',' << o.failed << ','
              << format_double(iv.mean) << ',' << format_double(iv.sd) << ','
              << format_double(ho.n ? ho.mean : nan) << ','
              << format_double(ho.n ? ho.stderr_ : nan) << ','
              << format_double(re.n ? re.mean : nan) << ',' << o.infeasible_steps << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

int train_nn(const std::string& config_path, const std::string& model_out, std::ostream& log) {
  try {
    const RunFile run = parse_run_file(config_path);
    if (!run.dataset.has_value()) {
      throw ConfigError(config_path + ": train-nn requires a \"train\" section");
    }
    log << "generating dataset (" << run.dataset->n_trajectories << " trajectories, gamma="
        << run.dataset->gamma << ")\n";
    const TrajectoryDataset data = generate_dataset(*run.dataset);
    log << data.inputs.rows() << " training windows\n";

    MlpModel model = MlpModel::initialized(static_cast<int>(data.inputs.cols()),
                                           run.hidden_width, run.dataset->history_len,
                                           run.train.seed);
    const TrainReport report = train(model, data, run.train);
    model.save(model_out);

    std::ofstream loss_csv(model_out + ".loss.csv");
    loss_csv << "epoch,mse\n";
    for (std::size_t e = 0; e < report.epoch_loss.size(); ++e) {
      loss_csv << e << ',' << format_double(report.epoch_loss[e]) << "\n";
    }
    if (!report.epoch_loss.empty()) {
      log << "final training MSE: " << report.epoch_loss.back() << "\n";
    }
    log << "model written to " << model_out << "\n";
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

int write_influence_map(const std::string& config_path, const std::string& out_csv,
                        double gamma_override, double half_extent, double resolution,
                        std::ostream& log) {
  try {
    const RunFile run = parse_run_file(config_path);
    HumanConfig human = run.scenario.human;
    if (gamma_override >= 0.0) human.gamma = gamma_override;
    const InfluenceMap map =
        influence_map(human.build(run.scenario.ts), Vec2::Zero(), half_extent, resolution);
    std::ofstream out(out_csv);
    if (!out) throw ConfigError("cannot write " + out_csv);
    out << "x,y,influence\n";
    for (int i = 0; i < map.field.rows(); ++i) {
      for (int j = 0; j < map.field.cols(); ++j) {
        out << format_double(map.x_at(i)) << ',' << format_double(map.y_at(j)) << ','
            << format_double(map.field(i, j)) << "\n";
      }
    }
    log << "influence map (gamma=" << human.gamma << ") written to " << out_csv << "\n";
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

int write_reachable_series(const std::string& config_path, const std::string& out_csv,
                           std::uint64_t seed, std::ostream& log) {
  try {
    const RunFile run = parse_run_file(config_path);
    ScenarioConfig c = randomized_scenario(run.scenario, run.base_seed + seed);
    c.reachable.enabled = true;
    const EpisodeResult result = run_episode(c);
    std::ofstream out(out_csv);
    if (!out) throw ConfigError("cannot write " + out_csv);
    out << "k,reachable_area\n";
    for (const StepRecord& r : result.records) {
      out << r.k << ',' << format_double(r.reachable_area) << "\n";
    }
    log << "reachable-set series written to " << out_csv << "\n";
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

int write_held_out(const std::string& config_path, const std::string& out_csv,
                   std::uint64_t seed, std::ostream& log) {
  try {
    const RunFile run = parse_run_file(config_path);
    const ScenarioConfig c = randomized_scenario(run.scenario, run.base_seed + seed);
    const MaterializedSuite suite = materialize_suite(
        make_held_out_suite(run.held_out.seed, run.held_out.count, run.held_out.horizon, c));

    std::optional<MlpModel> model;
    if (c.model_kind == ModelKind::Neural) model = MlpModel::load(c.nn_model_path);
    const EpisodeResult result =
        c.model_kind == ModelKind::Analytical ? run_episode(c) : nn_adapt_episode(c, *model);
    const std::vector<double> curve =
        heldout_curve(run, c, result, suite, model ? &*model : nullptr);

    std::ofstream out(out_csv);
    if (!out) throw ConfigError("cannot write " + out_csv);
    out << "k,heldout_error\n";
    for (std::size_t k = 0; k < curve.size(); ++k) {
      out << k << ',' << format_double(curve[k]) << "\n";
    }
    log << "final held-out error: " << (curve.empty() ? 0.0 : curve.back()) << "\n";
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace hriex
