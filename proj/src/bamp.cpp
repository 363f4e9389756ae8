#include "ampcs/bamp.hpp"

#include <stdexcept>

#include "ampcs/denoiser.hpp"
#include "ampcs/detail/chain.hpp"

namespace ampcs {

PartPrior PartPrior::from(const BernoulliGaussianPrior& prior) {
  prior.validate();
  return PartPrior{prior.gamma0, prior.part_variance()};
}

double denoise_vector(const Vector& u, double beta, const Vector& gamma, double s2,
                      double gamma_clamp, Vector& x_hat) {
  DenoiserParams params{beta, 0.0, s2, gamma_clamp};
  double derivative_sum = 0.0;
  for (Eigen::Index n = 0; n < u.size(); ++n) {
    params.gamma = gamma[n];
    const DenoiserValue f = denoise_full(u[n], params);
    x_hat[n] = f.value;
    derivative_sum += f.derivative;
  }
  return derivative_sum;
}

PartRecovery bamp_recover(const RealMatrix& A, const Vector& y_part, const PartPrior& prior,
                          const RecoverySettings& settings) {
  settings.validate();
  if (y_part.size() != A.rows()) throw std::invalid_argument("bamp_recover: dimension mismatch");
  if (prior.gamma0.size() != A.cols()) throw std::invalid_argument("bamp_recover: prior length mismatch");
  if (!(prior.s2 > 0.0)) throw std::invalid_argument("bamp_recover: s2 must be > 0");

  detail::Chain chain(A.eigen(), y_part, settings);
  auto bayes = [&](const Vector& u, double beta, Vector& x_hat) {
    return denoise_vector(u, beta, prior.gamma0, prior.s2, settings.gamma_clamp, x_hat);
  };
  do {
    chain.step(bayes);
  } while (chain.can_continue());
  return chain.result();
}

RecoveryOutput cbamp_recover(const RealMatrix& A, const ComplexVector& y,
                             const BernoulliGaussianPrior& prior, const RecoverySettings& settings) {
  const PartPrior part = PartPrior::from(prior);
  RecoveryOutput out;
  out.real = bamp_recover(A, y.re, part, settings);
  out.imag = bamp_recover(A, y.im, part, settings);
  out.x_hat = combine(out.real.x_hat, out.imag.x_hat);
  out.gamma_re = prior.gamma0;
  out.gamma_im = prior.gamma0;
  out.iterations = std::max(out.real.iterations, out.imag.iterations);
  out.status = worst(out.real.status, out.imag.status);
  return out;
}

}  // namespace ampcs
