#pragma once

// Bayesian-optimal AMP for a real part with a Bernoulli-Gaussian prior, and the
// naive complex composition (cBAMP) that runs it on both parts independently.

#include "ampcs/model.hpp"

namespace ampcs {

/// Prior as seen by one real part: per-component zero probabilities and the
/// part variance s2 (sigma_x2 / 2 for the complex model).
struct PartPrior {
  Vector gamma0;
  double s2 = 0.5;

  static PartPrior from(const BernoulliGaussianPrior& prior);
};

/// Applies the MMSE denoiser componentwise, x_hat[n] = F(u[n]; beta, gamma[n]),
/// and returns sum_n F'(u[n]; beta, gamma[n]).
double denoise_vector(const Vector& u, double beta, const Vector& gamma, double s2,
                      double gamma_clamp, Vector& x_hat);

PartRecovery bamp_recover(const RealMatrix& A, const Vector& y_part, const PartPrior& prior,
                          const RecoverySettings& settings);

/// Two independent BAMP runs; gamma outputs echo gamma0.
RecoveryOutput cbamp_recover(const RealMatrix& A, const ComplexVector& y,
                             const BernoulliGaussianPrior& prior, const RecoverySettings& settings);

}  // namespace ampcs
