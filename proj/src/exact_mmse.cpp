#include "ampcs/exact_mmse.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>

namespace ampcs {
namespace {

// Relative noise level substituted for sigma_w2 = 0.
constexpr double kNoiselessFloor = 1e-10;

std::vector<Vector> enumerate_supports(const RealMatrix& A, const std::vector<const Vector*>& parts,
                                       const BernoulliGaussianPrior& prior, double sigma_w2_part) {
  const Eigen::Index M = A.rows();
  const Eigen::Index N = A.cols();
  if (N > kExactMmseMaxN) throw std::invalid_argument("exact_mmse: N too large for enumeration");
  if (prior.gamma0.size() != N) throw std::invalid_argument("exact_mmse: prior length mismatch");
  for (const Vector* y : parts) {
    if (y->size() != M) throw std::invalid_argument("exact_mmse: measurement length mismatch");
  }
  prior.validate();
  if (!(sigma_w2_part >= 0.0)) throw std::invalid_argument("exact_mmse: sigma_w2 must be >= 0");

  const double s2 = prior.part_variance();
  const double noise = sigma_w2_part > 0.0 ? sigma_w2_part : kNoiselessFloor * s2;
  const double ridge = noise / s2;
  const Eigen::MatrixXd& a = A.eigen();

  const std::size_t count = std::size_t{1} << N;
  double max_log_weight = -std::numeric_limits<double>::infinity();
  std::vector<double> log_weights(count);
  std::vector<std::vector<Vector>> means(count);

  for (std::size_t mask = 0; mask < count; ++mask) {
    double log_prior = 0.0;
    std::vector<Eigen::Index> support;
    for (Eigen::Index n = 0; n < N; ++n) {
      const bool active = (mask >> n) & 1U;
      if (active) support.push_back(n);
      log_prior += active ? std::log1p(-prior.gamma0[n]) : std::log(prior.gamma0[n]);
    }
    if (!std::isfinite(log_prior)) {
      log_weights[mask] = -std::numeric_limits<double>::infinity();
      continue;
    }

    const auto k = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd a_s(M, k);
    for (Eigen::Index j = 0; j < k; ++j) a_s.col(j) = a.col(support[static_cast<std::size_t>(j)]);

    // log det(noise I_M + s2 A_S A_S^T) = (M - k) log noise + k log s2 + log det(A_S^T A_S + ridge I).
    double log_det = static_cast<double>(M - k) * std::log(noise) + static_cast<double>(k) * std::log(s2);
    Eigen::LDLT<Eigen::MatrixXd> gram;
    if (k > 0) {
      Eigen::MatrixXd g = a_s.transpose() * a_s;
      g.diagonal().array() += ridge;
      gram.compute(g);
      log_det += gram.vectorD().array().log().sum();
    }

    double log_weight = log_prior;
    std::vector<Vector> part_means;
    for (const Vector* y : parts) {
      Vector coeffs = k > 0 ? Vector(gram.solve(a_s.transpose() * *y)) : Vector(0);
      const Vector residual = k > 0 ? Vector(*y - a_s * coeffs) : *y;
      // y^T C^{-1} y = ||y - A_S b||^2 / noise + ||b||^2 / s2 at the ridge solution b.
      const double quad = residual.squaredNorm() / noise + coeffs.squaredNorm() / s2;
      log_weight += -0.5 * (log_det + quad);
      Vector full = Vector::Zero(N);
      for (Eigen::Index j = 0; j < k; ++j) full[support[static_cast<std::size_t>(j)]] = coeffs[j];
      part_means.push_back(std::move(full));
    }
    log_weights[mask] = log_weight;
    means[mask] = std::move(part_means);
    max_log_weight = std::max(max_log_weight, log_weight);
  }

  std::vector<Vector> estimate(parts.size(), Vector::Zero(N));
  double total = 0.0;
  for (std::size_t mask = 0; mask < count; ++mask) {
    if (!std::isfinite(log_weights[mask])) continue;
    const double w = std::exp(log_weights[mask] - max_log_weight);
    total += w;
    for (std::size_t p = 0; p < parts.size(); ++p) estimate[p] += w * means[mask][p];
  }
  for (auto& e : estimate) e /= total;
  return estimate;
}

}  // namespace

Vector exact_mmse(const RealMatrix& A, const Vector& y_part, const BernoulliGaussianPrior& prior,
                  double sigma_w2_part) {
  return enumerate_supports(A, {&y_part}, prior, sigma_w2_part).front();
}

std::pair<Vector, Vector> exact_mmse_joint(const RealMatrix& A, const ComplexVector& y,
                                           const BernoulliGaussianPrior& prior,
                                           double sigma_w2_part) {
  auto both = enumerate_supports(A, {&y.re, &y.im}, prior, sigma_w2_part);
  return {std::move(both[0]), std::move(both[1])};
}

}  // namespace ampcs
