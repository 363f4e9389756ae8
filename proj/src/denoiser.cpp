#include "ampcs/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

namespace ampcs {

void DenoiserParams::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("denoiser: beta must be > 0");
  if (!(s2 > 0.0) || !std::isfinite(s2)) throw std::invalid_argument("denoiser: s2 must be > 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("denoiser: gamma must lie in [0,1]");
  if (!(gamma_clamp > 0.0 && gamma_clamp < 0.5)) {
    throw std::invalid_argument("denoiser: gamma_clamp must lie in (0, 0.5)");
  }
}

double log_normal_pdf(double x, double var) {
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + x * x / var);
}

double logistic(double l) {
  if (l >= 0.0) return 1.0 / (1.0 + std::exp(-l));
  const double e = std::exp(l);
  return e / (1.0 + e);
}

DenoiserValue denoise_full(double u, const DenoiserParams& p) {
  if (!std::isfinite(u)) throw std::invalid_argument("denoise: u must be finite");
  p.validate();

  const double gain = p.s2 / (p.s2 + p.beta);
  if (p.gamma >= 1.0) return {0.0, 0.0, 0.0};
  if (p.gamma <= 0.0) return {gain * u, gain, 1.0};

  const double gamma = std::clamp(p.gamma, p.gamma_clamp, 1.0 - p.gamma_clamp);
  // Log-odds of the active branch: (1-gamma) N(u;0,s2+beta) against gamma N(u;0,beta).
  const double curvature = p.s2 / (p.beta * (p.s2 + p.beta));
  const double log_odds = std::log1p(-gamma) - std::log(gamma) +
                          0.5 * std::log(p.beta / (p.s2 + p.beta)) + 0.5 * u * u * curvature;
  const double active = logistic(log_odds);
  const double inactive = logistic(-log_odds);

  DenoiserValue out;
  out.active_probability = active;
  out.value = active * gain * u;
  out.derivative = gain * active * (1.0 + inactive * u * u * curvature);
  return out;
}

double denoise(double u, const DenoiserParams& p) { return denoise_full(u, p).value; }

double denoise_deriv(double u, const DenoiserParams& p) { return denoise_full(u, p).derivative; }

double denoise_numeric(double u, const DenoiserParams& p) {
  if (!std::isfinite(u)) throw std::invalid_argument("denoise_numeric: u must be finite");
  p.validate();
  if (p.gamma >= 1.0) return 0.0;
  const double gamma = p.gamma <= 0.0 ? 0.0 : std::clamp(p.gamma, p.gamma_clamp, 1.0 - p.gamma_clamp);

  const double prior_sd = std::sqrt(p.s2);
  const double noise_sd = std::sqrt(p.beta);
  const double prior_norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * p.s2);

  // Likelihood kernel exp(-(x-u)^2 / (2 beta)); its normalisation cancels in the ratio.
  auto kernel = [&](double x) { return std::exp(-(x - u) * (x - u) / (2.0 * p.beta)); };
  auto prior_density = [&](double x) { return prior_norm * std::exp(-x * x / (2.0 * p.s2)); };

  const double lo = std::min(-10.0 * prior_sd, u - 12.0 * noise_sd);
  const double hi = std::max(10.0 * prior_sd, u + 12.0 * noise_sd);
  std::vector<double> breaks{lo, u - 8.0 * noise_sd, u, u + 8.0 * noise_sd, 0.0, hi};
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [&](double b) { return b < lo || b > hi; }),
               breaks.end());

  using Rule = boost::math::quadrature::gauss_kronrod<double, 61>;
  constexpr unsigned kMaxDepth = 20;
  constexpr double kTol = 1e-13;

  // Segment errors are judged against the whole integral: segments far in the
  // tails carry negligible mass and cannot meet a relative target of their own.
  double mass = 0.0, first_moment = 0.0;
  double err_mass = 0.0, err_moment = 0.0, l1_mass = 0.0, l1_moment = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i];
    const double b = breaks[i + 1];
    double err0 = 0.0, l1_0 = 0.0, err1 = 0.0, l1_1 = 0.0;
    mass += Rule::integrate([&](double x) { return prior_density(x) * kernel(x); }, a, b, kMaxDepth,
                            kTol, &err0, &l1_0);
    first_moment += Rule::integrate([&](double x) { return x * prior_density(x) * kernel(x); }, a, b,
                                    kMaxDepth, kTol, &err1, &l1_1);
    err_mass += err0;
    err_moment += err1;
    l1_mass += l1_0;
    l1_moment += l1_1;
  }
  if (err_mass > 1e-11 * l1_mass || err_moment > 1e-11 * l1_moment) {
    throw std::runtime_error(fmt::format(
        "denoise_numeric: quadrature did not converge (error {:.3e} / {:.3e})", err_mass, err_moment));
  }

  const double point = gamma * std::exp(-u * u / (2.0 * p.beta));
  const double denominator = point + (1.0 - gamma) * mass;
  if (!(denominator > 0.0) || !std::isfinite(denominator)) {
    throw std::runtime_error("denoise_numeric: evidence underflowed; u is too far in the tail");
  }
  return (1.0 - gamma) * first_moment / denominator;
}

}  // namespace ampcs
