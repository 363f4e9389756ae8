#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "ampcs/denoiser.hpp"
#include "ampcs/exact_mmse.hpp"

namespace ampcs {
namespace {

// Brute-force posterior mean in covariance form: for each support S,
// y ~ N(0, C_S) with C_S = sigma2 I + s2 A_S A_S^T, and E{x_S | y, S} = s2 A_S^T C_S^-1 y.
Vector covariance_form_oracle(const Eigen::MatrixXd& A, const Vector& y, double gamma0, double s2,
                              double sigma2) {
  const Eigen::Index M = A.rows(), N = A.cols();
  Vector mean = Vector::Zero(N);
  std::vector<double> log_w;
  std::vector<Vector> means;
  for (unsigned mask = 0; mask < (1u << N); ++mask) {
    Eigen::MatrixXd C = sigma2 * Eigen::MatrixXd::Identity(M, M);
    int k = 0;
    for (Eigen::Index n = 0; n < N; ++n) {
      if (mask & (1u << n)) {
        C += s2 * A.col(n) * A.col(n).transpose();
        ++k;
      }
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(C);
    const Vector Ciy = llt.solve(y);
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    log_w.push_back(k * std::log(1.0 - gamma0) + (N - k) * std::log(gamma0) - 0.5 * logdet -
                    0.5 * y.dot(Ciy));
    Vector m = Vector::Zero(N);
    for (Eigen::Index n = 0; n < N; ++n) {
      if (mask & (1u << n)) m[n] = s2 * A.col(n).dot(Ciy);
    }
    means.push_back(m);
  }
  const double top = *std::max_element(log_w.begin(), log_w.end());
  double total = 0.0;
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    const double w = std::exp(log_w[i] - top);
    total += w;
    mean += w * means[i];
  }
  return mean / total;
}

TEST(ExactMmse, IdentityMatrixReducesToScalarDenoiser) {
  const RealMatrix I(Eigen::MatrixXd::Identity(2, 2));
  const auto prior = BernoulliGaussianPrior::uniform(2, 0.7, 1.0);
  Vector y(2);
  y << 0.9, -2.2;
  const Vector x = exact_mmse(I, y, prior, 0.3);
  DenoiserParams p;
  p.beta = 0.3;
  p.gamma = 0.7;
  p.s2 = 0.5;
  EXPECT_NEAR(x[0], denoise(0.9, p), 1e-12);
  EXPECT_NEAR(x[1], denoise(-2.2, p), 1e-12);
}

TEST(ExactMmse, MatchesCovarianceFormEnumeration) {
  Rng rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    const auto A = gen_matrix(3, 5, rng);
    const auto x = gen_signal_exact_k(5, 2, 1.0, rng);
    const auto w = gen_noise(3, 0.05, rng);
    const auto y = measure(A, x, w);
    const auto prior = BernoulliGaussianPrior::uniform(5, 0.6, 1.0);
    const Vector got = exact_mmse(A, y.re, prior, 0.025);
    const Vector want = covariance_form_oracle(A.eigen(), y.re, 0.6, 0.5, 0.025);
    EXPECT_LE((got - want).cwiseAbs().maxCoeff(), 1e-10) << "rep " << rep;
  }
}

TEST(ExactMmse, GaussianPriorWithOrthonormalMatrixIsLinearMmse) {
  Rng rng(32);
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(Eigen::MatrixXd::Random(4, 4)).householderQ();
  const RealMatrix A(Q);
  Vector y = Vector::Random(4);
  const auto prior = BernoulliGaussianPrior::uniform(4, 0.0, 2.0);
  const double s2 = 1.0, sigma2 = 0.25;
  const Vector got = exact_mmse(A, y, prior, sigma2);
  const Vector want = s2 / (s2 + sigma2) * (Q.transpose() * y);
  EXPECT_LE((got - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ExactMmse, NoiselessSparseSignalIsRecovered) {
  Rng rng(33);
  const auto A = gen_matrix(6, 10, rng);
  const auto x = gen_signal_exact_k(10, 1, 1.0, rng);
  const auto y = measure(A, x, ComplexVector::zeros(6));
  const auto prior = BernoulliGaussianPrior::uniform(10, 0.8, 1.0);
  const Vector got = exact_mmse(A, y.re, prior, 0.0);
  EXPECT_LE((got - x.re).norm(), 1e-4 * std::max(1.0, x.re.norm()));
}

TEST(ExactMmse, JointWithIdentityUsesBothParts) {
  const RealMatrix I(Eigen::MatrixXd::Identity(1, 1));
  const auto prior = BernoulliGaussianPrior::uniform(1, 0.5, 1.0);
  const double beta = 0.2, s2 = 0.5;
  Vector yr(1), yi(1);
  yr << 0.4;
  yi << 1.5;
  const auto [xr, xi] = exact_mmse_joint(I, ComplexVector(yr, yi), prior, beta);
  const double curvature = s2 / (beta * (s2 + beta));
  const double log_odds = 2.0 * 0.5 * std::log(beta / (s2 + beta)) +
                          0.5 * curvature * (0.4 * 0.4 + 1.5 * 1.5);
  const double active = 1.0 / (1.0 + std::exp(-log_odds));
  const double gain = s2 / (s2 + beta);
  EXPECT_NEAR(xr[0], active * gain * 0.4, 1e-12);
  EXPECT_NEAR(xi[0], active * gain * 1.5, 1e-12);
}

TEST(ExactMmse, JointMatchesStackedRealProblem) {
  // With a shared support, the complex problem is a real one in which the two
  // parts of a component are switched on together; check it against enumeration
  // over the 2N-dimensional block problem.
  Rng rng(34);
  const auto A = gen_matrix(2, 3, rng);
  const auto x = gen_signal_exact_k(3, 1, 1.0, rng);
  const auto y = measure(A, x, gen_noise(2, 0.1, rng));
  const auto prior = BernoulliGaussianPrior::uniform(3, 0.6, 1.0);
  const double sigma2 = 0.05, s2 = 0.5;
  const auto [xr, xi] = exact_mmse_joint(A, y, prior, sigma2);

  Vector want_r = Vector::Zero(3), want_i = Vector::Zero(3);
  double total = 0.0;
  std::vector<double> log_w;
  for (unsigned mask = 0; mask < 8; ++mask) {
    Eigen::MatrixXd C = sigma2 * Eigen::MatrixXd::Identity(2, 2);
    int k = 0;
    for (int n = 0; n < 3; ++n) {
      if (mask & (1u << n)) {
        C += s2 * A.eigen().col(n) * A.eigen().col(n).transpose();
        ++k;
      }
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(C);
    const Vector cr = llt.solve(y.re), ci = llt.solve(y.im);
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double lw = k * std::log(0.4) + (3 - k) * std::log(0.6) - logdet - 0.5 * (y.re.dot(cr) + y.im.dot(ci));
    const double w = std::exp(lw);
    total += w;
    for (int n = 0; n < 3; ++n) {
      if (mask & (1u << n)) {
        want_r[n] += w * s2 * A.eigen().col(n).dot(cr);
        want_i[n] += w * s2 * A.eigen().col(n).dot(ci);
      }
    }
  }
  want_r /= total;
  want_i /= total;
  EXPECT_LE((xr - want_r).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((xi - want_i).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ExactMmse, RejectsLargeOrMismatchedProblems) {
  Rng rng(35);
  const auto big = gen_matrix(3, kExactMmseMaxN + 1, rng);
  EXPECT_THROW(exact_mmse(big, Vector::Zero(3), BernoulliGaussianPrior::uniform(kExactMmseMaxN + 1, 0.5, 1.0), 0.1),
               std::invalid_argument);
  const auto A = gen_matrix(3, 4, rng);
  EXPECT_THROW(exact_mmse(A, Vector::Zero(2), BernoulliGaussianPrior::uniform(4, 0.5, 1.0), 0.1),
               std::invalid_argument);
  EXPECT_THROW(exact_mmse(A, Vector::Zero(3), BernoulliGaussianPrior::uniform(4, 0.5, 1.0), -0.1),
               std::invalid_argument);
}

}  // namespace
}  // namespace ampcs
