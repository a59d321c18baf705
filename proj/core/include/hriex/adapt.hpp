#pragma once

#include <optional>
#include <random>

#include "hriex/human.hpp"
#include "hriex/world.hpp"

namespace hriex {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using PhiMatrix = Eigen::Matrix<double, 4, Eigen::Dynamic>;

/// Which block of the human model the robot estimates.
///   Intrinsic:   only A (B known) -- observation is the human state.
///   Interactive: only B (A known) -- observation is the feature vector.
///   Full:        both, or an arbitrary feature stack (neural last layer).
enum class UncertaintyMode { Intrinsic, Interactive, Full };

enum class MatrixNorm { Frobenius, Spectral };

/// Recursive-least-squares belief over the flattened human-model parameters.
/// theta stacks the rows of the estimated blocks: row i of [A B] (restricted to
/// the active blocks) occupies theta[i*m .. (i+1)*m) where m = obs dimension.
struct BeliefState {
  UncertaintyMode mode = UncertaintyMode::Full;
  VectorXd theta_hat;        // dim = n_state * m
  MatrixXd F;                // learning gain, SPD
  MatrixXd sigma_tt;         // parameter-error covariance, symmetric PSD
  VectorXd theta_err_mean;   // E[theta_tilde], needed by the drift cross terms
  VectorXd dtheta;           // assumed parameter drift per step
  double forgetting = 0.98;  // lambda in (0, 1]
  Mat4 noise_cov = Mat4::Zero();  // W
  std::optional<Mat4> known_A;    // present in Interactive mode
  std::optional<Mat4> known_B;    // present in Intrinsic mode
  int n_state = 4;

  int dim_theta() const { return static_cast<int>(theta_hat.size()); }
  int obs_dim() const { return dim_theta() / n_state; }
};

struct Prediction {
  Vec4 x_hat_next = Vec4::Zero();
  Mat4 sigma_H_next = Mat4::Zero();
};

/// Active part of the observation vector phi(k) = [x_H; u_H] for the mode.
VectorXd observation_vector(const BeliefState& belief, const Vec4& x_h, const Vec4& u_h);

/// Contribution of the known (not estimated) block to the state prediction.
Vec4 known_contribution(const BeliefState& belief, const Vec4& x_h, const Vec4& u_h);

/// Block-diagonal observation matrix: n_state copies of phi_vec^T.
PhiMatrix build_phi_from_obs(const VectorXd& phi_vec, int n_state);

/// Observation matrix for the linear human model under the belief's mode.
PhiMatrix build_phi(const BeliefState& belief, const Vec4& x_h, const Vec4& u_h);

Prediction predict_with_phi(const BeliefState& belief, const PhiMatrix& phi,
                            const Vec4& known_contrib);

/// A-priori state estimate and covariance for the linear model.
Prediction predict(const BeliefState& belief, const Vec4& x_h, const Vec4& u_h);

/// One RLS step: gain update, parameter update with the observed innovation,
/// drifted error-mean recursion, and the five-term covariance recursion
/// followed by symmetrization and an eigenvalue floor at zero.
BeliefState update(const BeliefState& belief, const Vec4& x_h_next_observed,
                   const PhiMatrix& phi, const Vec4& x_hat_next);

/// Covariance bookkeeping only (innovation at its expectation, zero): advances
/// F, sigma_tt and theta_err_mean but leaves theta_hat in place. This is the
/// virtual update used by the exploration lookahead.
BeliefState covariance_update(const BeliefState& belief, const PhiMatrix& phi);

double covariance_norm(const MatrixXd& sigma_tt, MatrixNorm norm = MatrixNorm::Frobenius);

/// Reconstructs the full (A, B) model from the belief (estimated blocks from
/// theta_hat, the rest from known_A / known_B). Linear modes only.
LinearHumanModel model_from_belief(const BeliefState& belief);

/// Belief for the analytical human model: theta from the true model with the
/// estimated blocks perturbed elementwise by N(0, perturbation^2), F = f0*I,
/// sigma_tt = sigma0*I.
BeliefState make_linear_belief(UncertaintyMode mode, const LinearHumanModel& truth,
                               double forgetting, double f0, double sigma0,
                               double dtheta_rate, const Mat4& noise_cov,
                               double perturbation, std::mt19937_64& rng);

}  // namespace hriex
