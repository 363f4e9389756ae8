#pragma once

// Exact posterior mean for small problems by enumerating all 2^N supports.
// Given a support S the measurement is Gaussian, y ~ N(0, sigma_w2 I + s2 A_S A_S^T),
// so each support contributes a closed-form evidence and conditional mean that
// only need |S| x |S| solves.

#include <utility>

#include "ampcs/model.hpp"

namespace ampcs {

inline constexpr Eigen::Index kExactMmseMaxN = 14;

/// Posterior mean of one real part. `sigma_w2_part` is that part's noise
/// variance; zero means noiseless and is regularised to a tiny positive value.
Vector exact_mmse(const RealMatrix& A, const Vector& y_part, const BernoulliGaussianPrior& prior,
                  double sigma_w2_part);

/// Posterior mean of both parts when the real and imaginary parts share their
/// support (the complex Bernoulli-Gaussian model).
std::pair<Vector, Vector> exact_mmse_joint(const RealMatrix& A, const ComplexVector& y,
                                           const BernoulliGaussianPrior& prior,
                                           double sigma_w2_part);

}  // namespace ampcs
