#include "ampcs/amp.hpp"

#include <cmath>
#include <stdexcept>

#include "ampcs/detail/chain.hpp"

namespace ampcs {

AmpConfig AmpConfig::for_sparsity(Eigen::Index K, RecoverySettings settings) {
  return AmpConfig{lambda_heuristic(K), settings};
}

void AmpConfig::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("AmpConfig: lambda must be > 0");
  settings.validate();
}

double soft_threshold(double u, double theta) {
  if (!(theta >= 0.0)) throw std::invalid_argument("soft_threshold: theta must be >= 0");
  const double magnitude = std::abs(u) - theta;
  if (magnitude <= 0.0) return 0.0;
  return std::copysign(magnitude, u);
}

double lambda_heuristic(Eigen::Index K) {
  if (K < 1) throw std::invalid_argument("lambda_heuristic: K must be >= 1");
  return 2.678 * std::pow(static_cast<double>(K), -0.181);
}

PartRecovery amp_recover(const RealMatrix& A, const Vector& y_part, const AmpConfig& cfg) {
  cfg.validate();
  if (y_part.size() != A.rows()) throw std::invalid_argument("amp_recover: dimension mismatch");

  detail::Chain chain(A.eigen(), y_part, cfg.settings);
  // eta' is 1 on the active set and 0 elsewhere, so the derivative sum is ||x_hat||_0.
  auto threshold = [&](const Vector& u, double beta, Vector& x_hat) {
    const double theta = cfg.lambda * std::sqrt(beta);
    double active = 0.0;
    for (Eigen::Index n = 0; n < u.size(); ++n) {
      x_hat[n] = soft_threshold(u[n], theta);
      if (x_hat[n] != 0.0) active += 1.0;
    }
    return active;
  };
  do {
    chain.step(threshold);
  } while (chain.can_continue());
  return chain.result();
}

RecoveryOutput camp_recover(const RealMatrix& A, const ComplexVector& y, const AmpConfig& cfg) {
  RecoveryOutput out;
  out.real = amp_recover(A, y.re, cfg);
  out.imag = amp_recover(A, y.im, cfg);
  out.x_hat = combine(out.real.x_hat, out.imag.x_hat);
  out.iterations = std::max(out.real.iterations, out.imag.iterations);
  out.status = worst(out.real.status, out.imag.status);
  return out;
}

}  // namespace ampcs
