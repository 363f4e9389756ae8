#include "ampcs/bossamp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ampcs/bamp.hpp"
#include "ampcs/denoiser.hpp"
#include "ampcs/detail/chain.hpp"

namespace ampcs {

double likelihood_update(double u, double beta, double gamma0, double s2, double gamma_clamp) {
  if (!std::isfinite(u) || !std::isfinite(beta) || !std::isfinite(gamma0) || !std::isfinite(s2)) {
    throw std::invalid_argument("likelihood_update: non-finite input");
  }
  if (!(beta > 0.0) || !(s2 > 0.0)) throw std::invalid_argument("likelihood_update: variances must be > 0");
  const double g = std::clamp(gamma0, gamma_clamp, 1.0 - gamma_clamp);
  return std::log(g) - std::log1p(-g) +
         0.5 * (std::log1p(s2 / beta) - u * u * s2 / (beta * (beta + s2)));
}

double prior_update(double l, double gamma_clamp) {
  return std::clamp(logistic(l), gamma_clamp, 1.0 - gamma_clamp);
}

RecoveryOutput cbossamp_recover(const RealMatrix& A, const ComplexVector& y,
                                const BernoulliGaussianPrior& prior,
                                const RecoverySettings& settings) {
  settings.validate();
  prior.validate();
  if (y.size() != A.rows()) throw std::invalid_argument("cbossamp_recover: dimension mismatch");
  if (prior.gamma0.size() != A.cols()) throw std::invalid_argument("cbossamp_recover: prior length mismatch");

  const double s2 = prior.part_variance();
  const double s2_likelihood =
      settings.likelihood_part_variance == PartVariance::kHalf ? s2 : prior.sigma_x2;
  const bool cross_beta = settings.likelihood_variant == LikelihoodVariant::kPrintedCrossBeta;

  detail::Chain re(A.eigen(), y.re, settings);
  detail::Chain im(A.eigen(), y.im, settings);
  Vector gamma_re = prior.gamma0;
  Vector gamma_im = prior.gamma0;

  auto denoiser_for = [&](const Vector& gamma) {
    return [&, gamma_ptr = &gamma](const Vector& u, double beta, Vector& x_hat) {
      return denoise_vector(u, beta, *gamma_ptr, s2, settings.gamma_clamp, x_hat);
    };
  };

  RecoveryOutput out;
  if (!settings.exchange) {
    // Without the exchange the chains are independent and each stops on its own rule.
    do {
      if (re.can_continue()) re.step(denoiser_for(gamma_re));
      if (im.can_continue()) im.step(denoiser_for(gamma_im));
    } while (re.can_continue() || im.can_continue());
    out.real = re.result();
    out.imag = im.result();
    out.status = worst(out.real.status, out.imag.status);
    out.iterations = std::max(out.real.iterations, out.imag.iterations);
  } else {
    double total_change = 0.0;
    do {
      re.step(denoiser_for(gamma_re));
      im.step(denoiser_for(gamma_im));
      if (re.failed() || im.failed()) break;

      const double beta_re = cross_beta ? im.beta() : re.beta();
      const double beta_im = cross_beta ? re.beta() : im.beta();
      for (Eigen::Index n = 0; n < gamma_re.size(); ++n) {
        const double l_re = likelihood_update(re.u()[n], beta_re, prior.gamma0[n], s2_likelihood,
                                              settings.gamma_clamp);
        const double l_im = likelihood_update(im.u()[n], beta_im, prior.gamma0[n], s2_likelihood,
                                              settings.gamma_clamp);
        gamma_im[n] = prior_update(l_re, settings.gamma_clamp);
        gamma_re[n] = prior_update(l_im, settings.gamma_clamp);
      }
      total_change = re.change() + im.change();
    } while (total_change > settings.eps_tol && re.iterations() < settings.t_max);

    out.real = re.result();
    out.imag = im.result();
    if (re.failed() || im.failed()) {
      out.status = worst(out.real.status, out.imag.status);
    } else {
      out.status = total_change <= settings.eps_tol ? RecoveryStatus::kConverged
                                                    : RecoveryStatus::kMaxIterations;
    }
    // Per-part statuses follow the joint stopping rule.
    if (!re.failed()) out.real.status = out.status == RecoveryStatus::kConverged ? out.status : RecoveryStatus::kMaxIterations;
    if (!im.failed()) out.imag.status = out.status == RecoveryStatus::kConverged ? out.status : RecoveryStatus::kMaxIterations;
    out.iterations = re.iterations();
  }

  out.x_hat = combine(out.real.x_hat, out.imag.x_hat);
  out.gamma_re = std::move(gamma_re);
  out.gamma_im = std::move(gamma_im);
  return out;
}

}  // namespace ampcs
