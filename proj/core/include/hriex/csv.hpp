#pragma once

#include <string>
#include <vector>

#include "hriex/metrics.hpp"

namespace hriex {

/// Shortest round-trip-exact decimal form of a double ("%.17g" fallback).
std::string format_double(double value);

/// Step-log CSV. Columns:
///   k, phi, phi0, lambda_sea, intervened, infeasible, near_singular,
///   runtime_error, cov_norm, reachable_area, heldout_error,
///   human_px, human_py, human_vx, human_vy, robot_px, robot_py, robot_vx, robot_vy,
///   u_ref_x, u_ref_y, u_safe_x, u_safe_y, chosen_index, tie_break
/// plus j_0..j_{m-1} when any record carries exploration costs.
/// heldout_error is the held-out error of the model snapshot after step k
/// (NaN when not evaluated).
void write_episode_csv(const std::string& path, const std::vector<StepRecord>& records,
                       const std::vector<double>& heldout_per_step);

/// Columns parsed back from an episode CSV (the subset metrics need).
struct ParsedStep {
  int k = 0;
  double phi = 0.0;
  double lambda_sea = 0.0;
  bool intervened = false;
  bool infeasible = false;
  double runtime_error = 0.0;
  double cov_norm = 0.0;
  double reachable_area = 0.0;
  double heldout_error = 0.0;
};

std::vector<ParsedStep> read_episode_csv(const std::string& path);

struct SeriesStats {
  double mean = 0.0;
  double sd = 0.0;      // sample standard deviation
  double stderr_ = 0.0; // sd / sqrt(n)
  std::size_t n = 0;
};

SeriesStats series_stats(const std::vector<double>& values);

}  // namespace hriex
