#include "hriex/adapt.hpp"

#include <cassert>
#include <cmath>

#include "hriex/errors.hpp"

namespace hriex {

namespace {

MatrixXd symmetrized(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// PSD projection: symmetrize, then clamp negative eigenvalues to zero. The
// Cholesky probe skips the eigendecomposition on the (common) already-PD path.
MatrixXd floor_psd(const MatrixXd& m) {
  MatrixXd s = symmetrized(m);
  Eigen::LLT<MatrixXd> llt(s);
  if (llt.info() == Eigen::Success) return s;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(s);
  VectorXd vals = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

VectorXd observation_vector(const BeliefState& belief, const Vec4& x_h, const Vec4& u_h) {
  switch (belief.mode) {
    case UncertaintyMode::Intrinsic:
      return x_h;
    case UncertaintyMode::Interactive:
      return u_h;
    case UncertaintyMode::Full: {
      VectorXd phi(8);
      phi << x_h, u_h;
      return phi;
    }
  }
  throw ConfigError("observation_vector: unknown mode");
}

Vec4 known_contribution(const BeliefState& belief, const Vec4& x_h, const Vec4& u_h) {
  switch (belief.mode) {
    case UncertaintyMode::Intrinsic:
      if (!belief.known_B) throw ConfigError("Intrinsic mode requires known_B");
      return *belief.known_B * u_h;
    case UncertaintyMode::Interactive:
      if (!belief.known_A) throw ConfigError("Interactive mode requires known_A");
      return *belief.known_A * x_h;
    case UncertaintyMode::Full:
      return Vec4::Zero();
  }
  throw ConfigError("known_contribution: unknown mode");
}

PhiMatrix build_phi_from_obs(const VectorXd& phi_vec, int n_state) {
  const int m = static_cast<int>(phi_vec.size());
  PhiMatrix phi = PhiMatrix::Zero(n_state, n_state * m);
  for (int i = 0; i < n_state; ++i) {
    phi.block(i, i * m, 1, m) = phi_vec.transpose();
  }
  return phi;
}

PhiMatrix build_phi(const BeliefState& belief, const Vec4& x_h, const Vec4& u_h) {
  const VectorXd phi_vec = observation_vector(belief, x_h, u_h);
  if (static_cast<int>(phi_vec.size()) != belief.obs_dim()) {
    throw ConfigError("build_phi: observation dimension does not match theta");
  }
  return build_phi_from_obs(phi_vec, belief.n_state);
}

Prediction predict_with_phi(const BeliefState& belief, const PhiMatrix& phi,
                            const Vec4& known_contrib) {
  if (phi.cols() != belief.dim_theta()) {
    throw ConfigError("predict: Phi/theta dimension mismatch");
  }
  Prediction p;
  p.x_hat_next = known_contrib + phi * belief.theta_hat;
  p.sigma_H_next = phi * belief.sigma_tt * phi.transpose() + belief.noise_cov;
  p.sigma_H_next = 0.5 * (p.sigma_H_next + p.sigma_H_next.transpose());
  return p;
}

Prediction predict(const BeliefState& belief, const Vec4& x_h, const Vec4& u_h) {
  return predict_with_phi(belief, build_phi(belief, x_h, u_h),
                          known_contribution(belief, x_h, u_h));
}

namespace {

// Shared tail of the real and virtual updates: learning gain, error-mean and
// covariance recursions. theta_hat is untouched here.
void advance_gain_and_covariance(BeliefState& b, const PhiMatrix& phi) {
  const double lambda = b.forgetting;
  const MatrixXd& F = b.F;

  // F(k+1) = (1/lambda) [F - F Phi^T (lambda I + Phi F Phi^T)^{-1} Phi F]
  const MatrixXd phiF = phi * F;                                   // 4 x n
  MatrixXd inner = MatrixXd::Identity(4, 4) * lambda + phiF * phi.transpose();
  const MatrixXd solved = inner.ldlt().solve(phiF);                // 4 x n
  MatrixXd F_next = (F - phiF.transpose() * solved) / lambda;
  F_next = symmetrized(F_next);

  const MatrixXd phiTphi = phi.transpose() * phi;                  // n x n, rank <= 4
  const MatrixXd G = F_next * phiTphi;

  const VectorXd err_mean_next =
      (MatrixXd::Identity(b.dim_theta(), b.dim_theta()) - G) * b.theta_err_mean + b.dtheta;

  // Sigma_H(k+1) from the pre-update covariance.
  const MatrixXd sigma_h =
      phi * b.sigma_tt * phi.transpose() + b.noise_cov;

  MatrixXd sigma_next = F_next * phi.transpose() * sigma_h * phi * F_next
                      - b.sigma_tt * phiTphi * F_next
                      - F_next * phiTphi * b.sigma_tt
                      + err_mean_next * b.dtheta.transpose()
                      + b.dtheta * err_mean_next.transpose()
                      - b.dtheta * b.dtheta.transpose()
                      + b.sigma_tt;
  b.sigma_tt = floor_psd(sigma_next);
  b.F = F_next;
  b.theta_err_mean = err_mean_next;

#ifndef NDEBUG
  {
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(b.F, Eigen::EigenvaluesOnly);
    assert(eig.eigenvalues().minCoeff() > 0.0 && "learning gain lost positive definiteness");
  }
#endif
}

}  // namespace

BeliefState update(const BeliefState& belief, const Vec4& x_h_next_observed,
                   const PhiMatrix& phi, const Vec4& x_hat_next) {
  if (belief.forgetting <= 0.0 || belief.forgetting > 1.0) {
    throw ConfigError("update: forgetting factor must be in (0, 1]");
  }
  BeliefState next = belief;
  const Vec4 innovation = x_h_next_observed - x_hat_next;
  advance_gain_and_covariance(next, phi);
  next.theta_hat = belief.theta_hat + next.F * phi.transpose() * innovation;
  return next;
}

BeliefState covariance_update(const BeliefState& belief, const PhiMatrix& phi) {
  BeliefState next = belief;
  advance_gain_and_covariance(next, phi);
  return next;
}

double covariance_norm(const MatrixXd& sigma_tt, MatrixNorm norm) {
  if (norm == MatrixNorm::Frobenius) return sigma_tt.norm();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sigma_tt, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

LinearHumanModel model_from_belief(const BeliefState& belief) {
  LinearHumanModel m;
  const int obs = belief.obs_dim();
  auto row_block = [&](int row) { return belief.theta_hat.segment(row * obs, obs); };
  switch (belief.mode) {
    case UncertaintyMode::Intrinsic:
      for (int i = 0; i < 4; ++i) m.A.row(i) = row_block(i).transpose();
      m.B = belief.known_B.value();
      break;
    case UncertaintyMode::Interactive:
      for (int i = 0; i < 4; ++i) m.B.row(i) = row_block(i).transpose();
      m.A = belief.known_A.value();
      break;
    case UncertaintyMode::Full:
      if (obs != 8) throw ConfigError("model_from_belief: Full mode expects obs dim 8");
      for (int i = 0; i < 4; ++i) {
        m.A.row(i) = row_block(i).head(4).transpose();
        m.B.row(i) = row_block(i).tail(4).transpose();
      }
      break;
  }
  return m;
}

BeliefState make_linear_belief(UncertaintyMode mode, const LinearHumanModel& truth,
                               double forgetting, double f0, double sigma0,
                               double dtheta_rate, const Mat4& noise_cov,
                               double perturbation, std::mt19937_64& rng) {
  BeliefState b;
  b.mode = mode;
  b.forgetting = forgetting;
  b.noise_cov = noise_cov;
  const int obs = (mode == UncertaintyMode::Full) ? 8 : 4;
  const int dim = 4 * obs;
  b.theta_hat = VectorXd::Zero(dim);
  for (int i = 0; i < 4; ++i) {
    switch (mode) {
      case UncertaintyMode::Intrinsic:
        b.theta_hat.segment(i * obs, obs) = truth.A.row(i).transpose();
        break;
      case UncertaintyMode::Interactive:
        b.theta_hat.segment(i * obs, obs) = truth.B.row(i).transpose();
        break;
      case UncertaintyMode::Full:
        b.theta_hat.segment(i * obs, 4) = truth.A.row(i).transpose();
        b.theta_hat.segment(i * obs + 4, 4) = truth.B.row(i).transpose();
        break;
    }
  }
  if (perturbation > 0.0) {
    std::normal_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < dim; ++i) b.theta_hat(i) += perturbation * unit(rng);
  }
  b.F = f0 * MatrixXd::Identity(dim, dim);
  b.sigma_tt = sigma0 * MatrixXd::Identity(dim, dim);
  b.theta_err_mean = VectorXd::Zero(dim);
  b.dtheta = VectorXd::Constant(dim, dtheta_rate);
  if (mode == UncertaintyMode::Intrinsic) b.known_B = truth.B;
  if (mode == UncertaintyMode::Interactive) b.known_A = truth.A;
  return b;
}

}  // namespace hriex
