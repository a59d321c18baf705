#pragma once

#include <memory>

#include "hriex/adapt.hpp"
#include "hriex/world.hpp"

namespace hriex {

/// Observation handed to the RLS layer for one step.
struct Observation {
  VectorXd phi_vec;                   // active observation vector
  Vec4 known_contrib = Vec4::Zero();  // prediction part outside Phi * theta
  bool near_singular = false;
};

/// Bridges a concrete human-model representation (linear-in-features or
/// neural last layer) to the adaptation and exploration machinery. The
/// virtual observation is evaluated at a hypothetical next state so the
/// two-step covariance lookahead can score candidate controls.
class HumanModelAdapter {
 public:
  virtual ~HumanModelAdapter() = default;

  virtual Observation observe(const EnvState& env, const BeliefState& belief) const = 0;

  virtual Observation observe_virtual(const EnvState& env, const Vec4& x_h_next,
                                      const AgentState& robot_next,
                                      const BeliefState& belief) const = 0;

  /// Commits the step's realized triple into any internal history.
  virtual void push(const EnvState& env) = 0;
};

/// Adapter for the analytical linear-in-features model. Stateless.
class LinearModelAdapter final : public HumanModelAdapter {
 public:
  Observation observe(const EnvState& env, const BeliefState& belief) const override;
  Observation observe_virtual(const EnvState& env, const Vec4& x_h_next,
                              const AgentState& robot_next,
                              const BeliefState& belief) const override;
  void push(const EnvState&) override {}
};

}  // namespace hriex
