#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "hriex/config.hpp"

namespace hriex {

/// One cell of the experiment grid.
struct GridCell {
  std::string id;
  RiskPreference::Kind risk = RiskPreference::Kind::Neutral;
  UncertaintyMode uncertainty = UncertaintyMode::Interactive;
  ModelKind model_kind = ModelKind::Analytical;
  bool safety_enabled = true;
  double gamma = 30.0;
};

struct MatrixOptions {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed_offset = 0;
  int jobs = 1;
};

/// Runs every declared grid cell over the declared seeds; writes per-episode
/// step logs, per-cell aggregated curves and a summary table. Returns 0 on
/// success; invalid configs return nonzero after printing a located message.
int run_matrix(const MatrixOptions& options, std::ostream& log);

/// Dataset generation + training per the config's "train" section; writes the
/// model file and a training-loss CSV next to it.
int train_nn(const std::string& config_path, const std::string& model_out, std::ostream& log);

/// Influence field of the configured human written as an x,y,value CSV.
int write_influence_map(const std::string& config_path, const std::string& out_csv,
                        double gamma_override, double half_extent, double resolution,
                        std::ostream& log);

/// Single-episode reachable-set time series (k, area) CSV.
int write_reachable_series(const std::string& config_path, const std::string& out_csv,
                           std::uint64_t seed, std::ostream& log);

/// Runs one episode, evaluates the final adapted model on the held-out suite,
/// writes the per-step held-out curve and prints the final value.
int write_held_out(const std::string& config_path, const std::string& out_csv,
                   std::uint64_t seed, std::ostream& log);

}  // namespace hriex
