#pragma once

// Scalar MMSE denoiser for the decoupled channel u = x + v, v ~ N(0, beta),
// with the per-part Bernoulli-Gaussian prior x ~ gamma delta(x) + (1-gamma) N(0, s2).

namespace ampcs {

inline constexpr double kDefaultGammaClamp = 1e-12;

struct DenoiserParams {
  double beta = 1.0;   // effective noise variance
  double gamma = 0.5;  // probability that x is exactly zero
  double s2 = 0.5;     // variance of an active component
  double gamma_clamp = kDefaultGammaClamp;

  void validate() const;
};

struct DenoiserValue {
  double value = 0.0;
  double derivative = 0.0;
  double active_probability = 0.0;  // posterior P(x != 0 | u)
};

/// Posterior mean E{x | u}.
double denoise(double u, const DenoiserParams& p);

/// d/du E{x | u}.
double denoise_deriv(double u, const DenoiserParams& p);

/// Value and derivative in one pass.
DenoiserValue denoise_full(double u, const DenoiserParams& p);

/// Posterior mean computed by adaptive quadrature over the continuous branch.
/// Independent of the closed form; used only for validation. Throws
/// std::runtime_error when the quadrature error estimate misses its tolerance.
double denoise_numeric(double u, const DenoiserParams& p);

/// log N(x; 0, var).
double log_normal_pdf(double x, double var);

/// Numerically safe logistic 1 / (1 + exp(-l)).
double logistic(double l);

}  // namespace ampcs
