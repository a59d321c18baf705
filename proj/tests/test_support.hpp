#pragma once

#include <random>

#include "hriex/config.hpp"
#include "hriex/world.hpp"

namespace hriex::test {

inline std::mt19937_64 rng(std::uint64_t seed = 42) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline Vec2 random_vec2(std::mt19937_64& g, double scale = 3.0) {
  return Vec2(uniform(g, -scale, scale), uniform(g, -scale, scale));
}

inline Vec4 random_vec4(std::mt19937_64& g, double scale = 3.0) {
  Vec4 v;
  for (int i = 0; i < 4; ++i) v(i) = uniform(g, -scale, scale);
  return v;
}

inline AgentState random_agent(std::mt19937_64& g, double pos_scale = 3.0,
                               double vel_scale = 1.5) {
  return AgentState{random_vec2(g, pos_scale), random_vec2(g, vel_scale)};
}

/// Scenario with explicit states filled in, usable without the batch runner.
inline ScenarioConfig basic_scenario(std::uint64_t seed = 1) {
  ScenarioConfig c;
  c.seed = seed;
  c.human_start = AgentState{Vec2(-4.0, 0.3), Vec2::Zero()};
  c.robot_start = AgentState{Vec2(0.2, -4.0), Vec2::Zero()};
  c.robot_goal = Vec2(0.0, 4.0);
  c.goal_schedule = {{Vec2(4.0, -0.2), 0}, {Vec2(-4.0, 0.5), 50}};
  return c;
}

}  // namespace hriex::test
