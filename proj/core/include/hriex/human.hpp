#pragma once

#include <random>

#include "hriex/world.hpp"

namespace hriex {

/// Singularity clamp for the 1/d^2 repulsion term (meters).
inline constexpr double kMinAgentDistance = 0.01;

/// Feature vector shared between the simulated human and the robot's estimated
/// model: [p_H - p_G ; (p_H - p_R) / d^2].
struct FeatureVector {
  Vec4 values = Vec4::Zero();
  bool near_singular = false;  // d was clamped to kMinAgentDistance
};

FeatureVector features(const AgentState& human, const AgentState& robot, const Vec2& human_goal);

/// Ground-truth simulated human: double integrator driven by a potential field,
///   a = -k_goal * (x_H - x_G) + (gamma / d^2) * k_repel * (x_H - x_R),
/// with additive Gaussian process noise N(0, noise_cov) on the next state.
struct PotentialFieldHuman {
  Mat24 k_goal = Mat24::Zero();   // acts on the 4D goal error
  Mat24 k_repel = Mat24::Zero();  // position block only; velocity block must stay zero
  double gamma = 30.0;
  double ts = 0.1;
  Mat4 noise_cov = Mat4::Zero();  // W, symmetric PSD

  /// PD attraction (k_p on position error, k_d damping) and isotropic repulsion gain k_r.
  static PotentialFieldHuman standard(double gamma, double ts, double k_p, double k_d,
                                      double k_r, const Mat4& noise_cov);
};

/// Exact linear-in-features form of the simulated human:
/// x_H(k+1) = A * x_H(k) + B * features(k)  (noise-free), gamma folded into B.
struct LinearHumanModel {
  Mat4 A = Mat4::Zero();
  Mat4 B = Mat4::Zero();

  Vec4 predict(const Vec4& x_h, const Vec4& feature_values) const {
    return A * x_h + B * feature_values;
  }
};

/// Acceleration commanded by the potential field at the given state.
Vec2 human_control(const PotentialFieldHuman& h, const EnvState& env);

/// Advances the human one step; draws noise from rng when noise_cov != 0.
AgentState step_human(const PotentialFieldHuman& h, const EnvState& env, std::mt19937_64& rng);

/// Factorizes the potential-field human into (A, B). Requires the velocity
/// block of k_repel to be zero (otherwise the repulsion is not expressible in
/// the position-only feature); throws ConfigError if not.
LinearHumanModel ground_truth_params(const PotentialFieldHuman& h);

}  // namespace hriex
