#include "hriex/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hriex/errors.hpp"

namespace hriex {

std::string format_double(double value) {
  char buf[40];
  // shortest representation that parses back to the same double
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value || std::isnan(value)) break;
  }
  return buf;
}

void write_episode_csv(const std::string& path, const std::vector<StepRecord>& records,
                       const std::vector<double>& heldout_per_step) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write episode log: " + path);

  std::size_t j_count = 0;
  for (const StepRecord& r : records) j_count = std::max(j_count, r.j_values.size());

  out << "k,phi,phi0,lambda_sea,intervened,infeasible,near_singular,runtime_error,"
         "cov_norm,reachable_area,heldout_error,human_px,human_py,human_vx,human_vy,"
         "robot_px,robot_py,robot_vx,robot_vy,u_ref_x,u_ref_y,u_safe_x,u_safe_y,"
         "chosen_index,tie_break";
  for (std::size_t j = 0; j < j_count; ++j) out << ",j_" << j;
  out << "\n";

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const StepRecord& r = records[i];
    const double heldout = i < heldout_per_step.size() ? heldout_per_step[i] : nan;
    out << r.k << ',' << format_double(r.phi) << ',' << format_double(r.phi0) << ','
        << format_double(r.lambda_sea) << ',' << (r.intervened ? 1 : 0) << ','
        << (r.infeasible ? 1 : 0) << ',' << (r.near_singular ? 1 : 0) << ','
        << format_double(r.runtime_error) << ',' << format_double(r.cov_norm) << ','
        << format_double(r.reachable_area) << ',' << format_double(heldout) << ','
        << format_double(r.env.human.pos.x()) << ',' << format_double(r.env.human.pos.y())
        << ',' << format_double(r.env.human.vel.x()) << ','
        << format_double(r.env.human.vel.y()) << ',' << format_double(r.env.robot.pos.x())
        << ',' << format_double(r.env.robot.pos.y()) << ','
        << format_double(r.env.robot.vel.x()) << ',' << format_double(r.env.robot.vel.y())
        << ',' << format_double(r.u_ref.x()) << ',' << format_double(r.u_ref.y()) << ','
        << format_double(r.u_safe.x()) << ',' << format_double(r.u_safe.y()) << ','
        << r.chosen_index << ',' << (r.tie_break ? 1 : 0);
    for (std::size_t j = 0; j < j_count; ++j) {
      out << ',' << (j < r.j_values.size() ? format_double(r.j_values[j]) : "nan");
    }
    out << "\n";
  }
}

std::vector<ParsedStep> read_episode_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read episode log: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty episode log: " + path);

  std::vector<ParsedStep> rows;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 25) throw ConfigError("short row in episode log: " + path);
    ParsedStep step;
    step.k = std::atoi(cells[0].c_str());
    step.phi = std::strtod(cells[1].c_str(), nullptr);
    step.lambda_sea = std::strtod(cells[3].c_str(), nullptr);
    step.intervened = cells[4] == "1";
    step.infeasible = cells[5] == "1";
    step.runtime_error = std::strtod(cells[7].c_str(), nullptr);
    step.cov_norm = std::strtod(cells[8].c_str(), nullptr);
    step.reachable_area = std::strtod(cells[9].c_str(), nullptr);
    step.heldout_error = std::strtod(cells[10].c_str(), nullptr);
    rows.push_back(step);
  }
  return rows;
}

SeriesStats series_stats(const std::vector<double>& values) {
  SeriesStats s;
  s.n = values.size();
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(sq / static_cast<double>(s.n - 1));
    s.stderr_ = s.sd / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

}  // namespace hriex
