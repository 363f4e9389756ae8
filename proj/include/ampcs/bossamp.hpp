#pragma once

// Complex BOSSAMP: two BAMP chains (real and imaginary part) that share one
// activity variable per component. After every iteration each chain turns its
// decoupled observation u into an activity log-likelihood ratio, and the other
// chain uses the resulting zero probability as its prior for the next step.

#include "ampcs/model.hpp"

namespace ampcs {

/// Log-odds that a component is zero given its decoupled observation u:
///   log(g0 / (1 - g0)) + 1/2 (log((beta + s2) / beta) - u^2 s2 / (beta (beta + s2))).
/// gamma0 is clamped to [gamma_clamp, 1 - gamma_clamp].
double likelihood_update(double u, double beta, double gamma0, double s2,
                         double gamma_clamp = 1e-12);

/// Logistic map back to a zero probability, clamped to [gamma_clamp, 1 - gamma_clamp].
double prior_update(double l, double gamma_clamp = 1e-12);

RecoveryOutput cbossamp_recover(const RealMatrix& A, const ComplexVector& y,
                                const BernoulliGaussianPrior& prior,
                                const RecoverySettings& settings);

}  // namespace ampcs
