#include <doctest.h>

#include <cmath>

#include "hriex/adapt.hpp"
#include "hriex/human.hpp"
#include "test_support.hpp"

using namespace hriex;

namespace {

BeliefState blank_belief(UncertaintyMode mode, double forgetting = 1.0, double f0 = 1.0,
                         double sigma0 = 1.0, const Mat4& w = Mat4::Zero()) {
  const int obs = mode == UncertaintyMode::Full ? 8 : 4;
  const int dim = 4 * obs;
  BeliefState b;
  b.mode = mode;
  b.forgetting = forgetting;
  b.noise_cov = w;
  b.theta_hat = VectorXd::Zero(dim);
  b.F = f0 * MatrixXd::Identity(dim, dim);
  b.sigma_tt = sigma0 * MatrixXd::Identity(dim, dim);
  b.theta_err_mean = VectorXd::Zero(dim);
  b.dtheta = VectorXd::Zero(dim);
  if (mode == UncertaintyMode::Intrinsic) b.known_B = Mat4::Zero();
  if (mode == UncertaintyMode::Interactive) b.known_A = Mat4::Zero();
  return b;
}

VectorXd flatten_rows(const Mat4& a, const Mat4& b) {
  VectorXd theta(32);
  for (int i = 0; i < 4; ++i) {
    theta.segment(i * 8, 4) = a.row(i).transpose();
    theta.segment(i * 8 + 4, 4) = b.row(i).transpose();
  }
  return theta;
}

}  // namespace

TEST_CASE("observation matrix structure") {
  SUBCASE("full mode: 4 x 32 with 8 nonzeros per row") {
    const BeliefState b = blank_belief(UncertaintyMode::Full);
    auto g = test::rng(1);
    const PhiMatrix phi = build_phi(b, test::random_vec4(g), test::random_vec4(g));
    REQUIRE(phi.rows() == 4);
    REQUIRE(phi.cols() == 32);
    for (int i = 0; i < 4; ++i) {
      int nonzeros = 0;
      for (int j = 0; j < 32; ++j) {
        if (phi(i, j) != 0.0) {
          ++nonzeros;
          CHECK(j >= i * 8);
          CHECK(j < (i + 1) * 8);
        }
      }
      CHECK(nonzeros == 8);
    }
  }
  SUBCASE("intrinsic mode is 4 x 16 and ignores the features") {
    const BeliefState b = blank_belief(UncertaintyMode::Intrinsic);
    auto g = test::rng(2);
    const Vec4 x = test::random_vec4(g);
    const PhiMatrix a = build_phi(b, x, test::random_vec4(g));
    const PhiMatrix c = build_phi(b, x, test::random_vec4(g));
    REQUIRE(a.cols() == 16);
    CHECK(a == c);
  }
}

TEST_CASE("Phi * flatten([A B]) equals A x + B u") {
  auto g = test::rng(3);
  BeliefState b = blank_belief(UncertaintyMode::Full);
  for (int trial = 0; trial < 50; ++trial) {
    Mat4 a, bm;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        a(i, j) = test::uniform(g, -2, 2);
        bm(i, j) = test::uniform(g, -2, 2);
      }
    b.theta_hat = flatten_rows(a, bm);
    const Vec4 x = test::random_vec4(g);
    const Vec4 u = test::random_vec4(g);
    const PhiMatrix phi = build_phi(b, x, u);
    const Vec4 via_phi = phi * b.theta_hat;
    CHECK((via_phi - (a * x + bm * u)).norm() < 1e-12);
  }
}

TEST_CASE("prediction covariance") {
  auto g = test::rng(4);
  SUBCASE("zero parameter covariance collapses to W") {
    Mat4 w = Mat4::Zero();
    w.diagonal() << 1e-4, 1e-4, 4e-4, 4e-4;
    BeliefState b = blank_belief(UncertaintyMode::Full, 1.0, 1.0, 0.0, w);
    const Prediction p = predict(b, test::random_vec4(g), test::random_vec4(g));
    CHECK((p.sigma_H_next - w).norm() == 0.0);
  }
  SUBCASE("exact parameters predict the noiseless human exactly") {
    const PotentialFieldHuman h =
        PotentialFieldHuman::standard(30.0, 0.1, 1.0, 1.4, 1.0, Mat4::Zero());
    const LinearHumanModel truth = ground_truth_params(h);
    BeliefState b = blank_belief(UncertaintyMode::Full);
    b.theta_hat = flatten_rows(truth.A, truth.B);
    for (int trial = 0; trial < 50; ++trial) {
      EnvState env;
      env.human = test::random_agent(g);
      env.robot = test::random_agent(g);
      env.human_goal = test::random_vec2(g);
      auto rng0 = test::rng(0);
      const AgentState next = step_human(h, env, rng0);
      const FeatureVector f = features(env.human, env.robot, env.human_goal);
      const Prediction p = predict(b, env.human.stacked(), f.values);
      CHECK((p.x_hat_next - next.stacked()).norm() < 1e-12);
    }
  }
  SUBCASE("Sigma_H stays PSD over random PSD parameter covariances") {
    Mat4 w = Mat4::Zero();
    w.diagonal() << 1e-4, 1e-4, 4e-4, 4e-4;
    for (int trial = 0; trial < 1000; ++trial) {
      BeliefState b = blank_belief(UncertaintyMode::Full, 1.0, 1.0, 0.0, w);
      MatrixXd root = MatrixXd::NullaryExpr(
          32, 32, [&]() { return test::uniform(g, -1, 1); });
      b.sigma_tt = root * root.transpose();
      const Prediction p = predict(b, test::random_vec4(g), test::random_vec4(g));
      const Eigen::LLT<Mat4> llt(p.sigma_H_next + 1e-12 * Mat4::Identity());
      CHECK(llt.info() == Eigen::Success);
    }
  }
}

TEST_CASE("update basics") {
  auto g = test::rng(5);
  SUBCASE("zero innovation and zero drift leave theta unchanged") {
    BeliefState b = blank_belief(UncertaintyMode::Full);
    auto g2 = test::rng(6);
    b.theta_hat = VectorXd::NullaryExpr(32, [&]() { return test::uniform(g2, -1, 1); });
    const Vec4 x = test::random_vec4(g);
    const Vec4 u = test::random_vec4(g);
    const PhiMatrix phi = build_phi(b, x, u);
    const Prediction p = predict(b, x, u);
    const BeliefState next = update(b, p.x_hat_next, phi, p.x_hat_next);
    CHECK(next.theta_hat == b.theta_hat);
  }
  SUBCASE("lambda = 1 with a zero observation matrix keeps F fixed") {
    BeliefState b = blank_belief(UncertaintyMode::Full, 1.0, 0.7);
    const PhiMatrix phi = PhiMatrix::Zero(4, 32);
    const BeliefState next = update(b, Vec4::Zero(), phi, Vec4::Zero());
    CHECK((next.F - b.F).norm() == 0.0);
  }
}

TEST_CASE("RLS equals the batch normal equations it recurses") {
  // Stationary system, lambda = 1, persistently exciting observations. The
  // batch oracle solves the same prior-regularized problem:
  //   (F0^-1 + sum Phi^T Phi) theta = F0^-1 theta0 + sum Phi^T x.
  auto g = test::rng(8);
  Mat4 a_true, b_true;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      a_true(i, j) = test::uniform(g, -1, 1);
      b_true(i, j) = test::uniform(g, -1, 1);
    }
  BeliefState belief = blank_belief(UncertaintyMode::Full, 1.0, 1.0);
  auto g0 = test::rng(9);
  belief.theta_hat = VectorXd::NullaryExpr(32, [&]() { return test::uniform(g0, -0.5, 0.5); });
  const VectorXd theta0 = belief.theta_hat;
  const double f0 = 1.0;

  MatrixXd h_acc = MatrixXd::Identity(32, 32) / f0;
  VectorXd b_acc = h_acc * theta0;

  for (int k = 0; k < 200; ++k) {
    const Vec4 x = test::random_vec4(g, 1.0);
    const Vec4 u = test::random_vec4(g, 1.0);
    const Vec4 x_next = a_true * x + b_true * u;  // noiseless
    const PhiMatrix phi = build_phi(belief, x, u);
    const Prediction p = predict(belief, x, u);
    belief = update(belief, x_next, phi, p.x_hat_next);
    h_acc += phi.transpose() * phi;
    b_acc += phi.transpose() * x_next;
  }
  const VectorXd theta_batch = h_acc.ldlt().solve(b_acc);
  CHECK((belief.theta_hat - theta_batch).cwiseAbs().maxCoeff() < 1e-6);
  // the unit prior leaves an O(1/k) bias toward theta0, so the truth is only
  // approached, not hit
  const double initial_gap = (theta0 - flatten_rows(a_true, b_true)).cwiseAbs().maxCoeff();
  CHECK((belief.theta_hat - flatten_rows(a_true, b_true)).cwiseAbs().maxCoeff() <
        0.1 * initial_gap);
}

TEST_CASE("learning-gain recursion matches the direct inverse form") {
  auto g = test::rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const double lambda = test::uniform(g, 0.9, 1.0);
    BeliefState b = blank_belief(UncertaintyMode::Intrinsic, lambda);
    MatrixXd root = MatrixXd::NullaryExpr(16, 16, [&]() { return test::uniform(g, -1, 1); });
    b.F = root * root.transpose() + 0.1 * MatrixXd::Identity(16, 16);
    const MatrixXd f_prev = b.F;
    const Vec4 x = test::random_vec4(g);
    const PhiMatrix phi = build_phi(b, x, Vec4::Zero());
    const BeliefState next = covariance_update(b, phi);
    const MatrixXd direct =
        (lambda * f_prev.inverse() + phi.transpose() * phi).inverse();
    CHECK((next.F - direct).norm() / direct.norm() < 1e-8);
  }
}

TEST_CASE("F stays symmetric positive definite along a run") {
  auto g = test::rng(11);
  BeliefState b = blank_belief(UncertaintyMode::Full, 0.98);
  for (int k = 0; k < 300; ++k) {
    const Vec4 x = test::random_vec4(g);
    const Vec4 u = test::random_vec4(g);
    const PhiMatrix phi = build_phi(b, x, u);
    b = covariance_update(b, phi);
    CHECK((b.F - b.F.transpose()).norm() < 1e-9 * b.F.norm());
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(b.F, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("Sigma stays symmetric PSD after flooring") {
  auto g = test::rng(12);
  Mat4 w = Mat4::Zero();
  w.diagonal() << 1e-4, 1e-4, 4e-4, 4e-4;
  BeliefState b = blank_belief(UncertaintyMode::Full, 0.98, 1.0, 1.0, w);
  for (int k = 0; k < 200; ++k) {
    const Vec4 x = test::random_vec4(g);
    const Vec4 u = test::random_vec4(g);
    b = covariance_update(b, build_phi(b, x, u));
    CHECK((b.sigma_tt - b.sigma_tt.transpose()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(b.sigma_tt, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
  }
}

TEST_CASE("noiseless stationary system: prediction error vanishes") {
  // Forgetting keeps the gain bounded away from zero, so the parameter error
  // contracts geometrically under persistent excitation.
  auto g = test::rng(13);
  Mat4 a_true = 0.3 * Mat4::Identity();
  a_true(0, 2) = 0.1;
  a_true(1, 3) = 0.1;
  Mat4 b_true;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) b_true(i, j) = test::uniform(g, -0.5, 0.5);

  BeliefState belief = blank_belief(UncertaintyMode::Full, 0.9);
  auto g0 = test::rng(14);
  belief.theta_hat = VectorXd::NullaryExpr(32, [&]() { return test::uniform(g0, -0.5, 0.5); });
  double last_error = 1.0;
  for (int k = 0; k < 500; ++k) {
    const Vec4 x = test::random_vec4(g, 2.0);
    const Vec4 u = test::random_vec4(g, 2.0);
    const Vec4 x_next = a_true * x + b_true * u;
    const PhiMatrix phi = build_phi(belief, x, u);
    const Prediction p = predict(belief, x, u);
    last_error = (x_next - p.x_hat_next).norm();
    belief = update(belief, x_next, phi, p.x_hat_next);
  }
  CHECK(last_error < 1e-8);
}

TEST_CASE("calibrated 3-sigma bounds cover the innovation") {
  // 1D projections (the form the safety margin uses) should cover >= 99%;
  // the full-state Mahalanobis ball at 3 covers ~93.9% for a 4D Gaussian.
  auto g = test::rng(15);
  Mat4 w = Mat4::Zero();
  w.diagonal() << 1e-4, 1e-4, 4e-4, 4e-4;
  const Eigen::LLT<Mat4> llt(w);

  Mat4 a_true = 0.5 * Mat4::Identity();
  Mat4 b_true = 0.3 * Mat4::Identity();
  BeliefState belief = blank_belief(UncertaintyMode::Full, 0.995, 1.0, 1.0, w);
  auto g0 = test::rng(16);
  belief.theta_hat = VectorXd::NullaryExpr(32, [&]() { return test::uniform(g0, -0.3, 0.3); });
  const RowVec4 projection = RowVec4(0.3, -1.0, 0.7, 0.2);

  std::normal_distribution<double> unit(0.0, 1.0);
  int inside_1d = 0, inside_4d = 0, total = 0;
  const int burn_in = 200;
  for (int k = 0; k < 10000 + burn_in; ++k) {
    const Vec4 x = test::random_vec4(g, 1.0);
    const Vec4 u = test::random_vec4(g, 1.0);
    Vec4 z;
    for (int i = 0; i < 4; ++i) z(i) = unit(g);
    const Vec4 x_next = a_true * x + b_true * u + llt.matrixL() * z;
    const PhiMatrix phi = build_phi(belief, x, u);
    const Prediction p = predict(belief, x, u);
    if (k >= burn_in) {
      const Vec4 innovation = x_next - p.x_hat_next;
      const double proj_err = std::abs((projection * innovation)(0));
      const double proj_std =
          std::sqrt((projection * p.sigma_H_next * projection.transpose())(0));
      if (proj_err <= 3.0 * proj_std) ++inside_1d;
      const double mahal2 = innovation.dot(p.sigma_H_next.ldlt().solve(innovation));
      if (mahal2 <= 9.0) ++inside_4d;
      ++total;
    }
    belief = update(belief, x_next, phi, p.x_hat_next);
  }
  CHECK(static_cast<double>(inside_1d) / total >= 0.99);
  CHECK(static_cast<double>(inside_4d) / total >= 0.90);
}

TEST_CASE("covariance norm") {
  CHECK(covariance_norm(MatrixXd::Zero(5, 5)) == 0.0);
  CHECK(covariance_norm(MatrixXd::Identity(9, 9)) == doctest::Approx(3.0));
  auto g = test::rng(18);
  MatrixXd m = MatrixXd::NullaryExpr(7, 7, [&]() { return test::uniform(g, -2, 2); });
  m = (m + m.transpose()).eval();
  double sq = 0.0;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) sq += m(i, j) * m(i, j);
  CHECK(covariance_norm(m) == doctest::Approx(std::sqrt(sq)).epsilon(1e-12));
  // spectral switch: largest absolute eigenvalue, here computed for a diagonal
  MatrixXd d = MatrixXd::Zero(3, 3);
  d.diagonal() << 1.0, -4.0, 2.0;
  CHECK(covariance_norm(d, MatrixNorm::Spectral) == doctest::Approx(4.0));
}

TEST_CASE("model round trip through the belief") {
  const PotentialFieldHuman h =
      PotentialFieldHuman::standard(30.0, 0.1, 1.0, 1.4, 1.0, Mat4::Zero());
  const LinearHumanModel truth = ground_truth_params(h);
  auto g = test::rng(19);
  for (UncertaintyMode mode :
       {UncertaintyMode::Intrinsic, UncertaintyMode::Interactive, UncertaintyMode::Full}) {
    const BeliefState b =
        make_linear_belief(mode, truth, 0.98, 1.0, 1.0, 0.0, Mat4::Zero(), 0.0, g);
    const LinearHumanModel back = model_from_belief(b);
    CHECK((back.A - truth.A).norm() < 1e-14);
    CHECK((back.B - truth.B).norm() < 1e-14);
  }
}
