#include "ampcs/support.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "ampcs/denoiser.hpp"

namespace ampcs {

SupportEstimate SupportEstimate::of(const ComplexVector& x) {
  std::vector<bool> active(static_cast<std::size_t>(x.size()));
  for (Eigen::Index n = 0; n < x.size(); ++n) {
    active[static_cast<std::size_t>(n)] = x.re[n] != 0.0 || x.im[n] != 0.0;
  }
  return SupportEstimate(std::move(active));
}

std::size_t SupportEstimate::count() const {
  return static_cast<std::size_t>(std::count(active_.begin(), active_.end(), true));
}

std::vector<std::size_t> SupportEstimate::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < active_.size(); ++n) {
    if (active_[n]) out.push_back(n);
  }
  return out;
}

SupportEstimate detect_prior_based(const Vector& gamma_r, const Vector& gamma_i) {
  if (gamma_r.size() != gamma_i.size()) throw std::invalid_argument("detect_prior_based: length mismatch");
  auto in_unit = [](const Vector& g) { return g.size() == 0 || (g.array() >= 0.0 && g.array() <= 1.0).all(); };
  if (!in_unit(gamma_r) || !in_unit(gamma_i)) {
    throw std::invalid_argument("detect_prior_based: gammas must lie in [0,1]");
  }
  std::vector<bool> active(static_cast<std::size_t>(gamma_r.size()));
  for (Eigen::Index n = 0; n < gamma_r.size(); ++n) {
    const double zero = gamma_r[n] * gamma_i[n];
    const double nonzero = (1.0 - gamma_r[n]) * (1.0 - gamma_i[n]);
    active[static_cast<std::size_t>(n)] = !(zero >= nonzero);
  }
  return SupportEstimate(std::move(active));
}

namespace {

void check(const EmInputs& in) {
  const auto n = in.u_r.size();
  if (in.u_i.size() != n || in.gamma_r.size() != n || in.gamma_i.size() != n) {
    throw std::invalid_argument("detect_em: length mismatch");
  }
  if (!(in.beta_r > 0.0) || !(in.beta_i > 0.0) || !(in.sigma_x2 > 0.0)) {
    throw std::invalid_argument("detect_em: variances must be > 0");
  }
}

// log sigma_ij for hypotheses (real active?, imag active?).
std::array<double, 4> log_sigmas(const EmInputs& in, Eigen::Index n) {
  const double half = 0.5 * in.sigma_x2;
  const double gr = std::clamp(in.gamma_r[n], in.gamma_clamp, 1.0 - in.gamma_clamp);
  const double gi = std::clamp(in.gamma_i[n], in.gamma_clamp, 1.0 - in.gamma_clamp);
  const double zr = std::log(gr) + log_normal_pdf(in.u_r[n], in.beta_r);
  const double ar = std::log1p(-gr) + log_normal_pdf(in.u_r[n], in.beta_r + half);
  const double zi = std::log(gi) + log_normal_pdf(in.u_i[n], in.beta_i);
  const double ai = std::log1p(-gi) + log_normal_pdf(in.u_i[n], in.beta_i + half);
  return {zr + zi, zr + ai, ar + zi, ar + ai};
}

}  // namespace

SupportEstimate detect_em(const EmInputs& in) {
  check(in);
  std::vector<bool> active(static_cast<std::size_t>(in.u_r.size()));
  for (Eigen::Index n = 0; n < in.u_r.size(); ++n) {
    const auto s = log_sigmas(in, n);
    active[static_cast<std::size_t>(n)] = !(s[0] >= s[3]);
  }
  return SupportEstimate(std::move(active));
}

SupportEstimate detect_em_cbamp(const Vector& u_r, const Vector& u_i, double beta_r, double beta_i,
                                const Vector& gamma0, double sigma_x2, double gamma_clamp) {
  return detect_em(EmInputs{u_r, u_i, beta_r, beta_i, gamma0, gamma0, sigma_x2, gamma_clamp});
}

std::vector<Responsibilities> em_responsibilities(const EmInputs& in) {
  check(in);
  std::vector<Responsibilities> out(static_cast<std::size_t>(in.u_r.size()));
  for (Eigen::Index n = 0; n < in.u_r.size(); ++n) {
    const auto s = log_sigmas(in, n);
    const double top = *std::max_element(s.begin(), s.end());
    std::array<double, 4> w{};
    double total = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      w[k] = std::exp(s[k] - top);
      total += w[k];
    }
    out[static_cast<std::size_t>(n)] = {w[0] / total, w[1] / total, w[2] / total, w[3] / total};
  }
  return out;
}

ComplexVector apply_support(const ComplexVector& x_hat, const SupportEstimate& s) {
  if (static_cast<std::size_t>(x_hat.size()) != s.size()) {
    throw std::invalid_argument("apply_support: length mismatch");
  }
  ComplexVector out = x_hat;
  for (Eigen::Index n = 0; n < out.size(); ++n) {
    if (!s.is_active(static_cast<std::size_t>(n))) {
      out.re[n] = 0.0;
      out.im[n] = 0.0;
    }
  }
  return out;
}

SupportMetrics support_metrics(const ComplexVector& true_x, const SupportEstimate& s) {
  if (static_cast<std::size_t>(true_x.size()) != s.size()) {
    throw std::invalid_argument("support_metrics: length mismatch");
  }
  const SupportEstimate truth = SupportEstimate::of(true_x);
  SupportMetrics m;
  for (std::size_t n = 0; n < s.size(); ++n) {
    if (s.is_active(n) && !truth.is_active(n)) ++m.false_positives;
    if (!s.is_active(n) && truth.is_active(n)) ++m.false_negatives;
  }
  m.exact_match = m.false_positives == 0 && m.false_negatives == 0;
  return m;
}

}  // namespace ampcs
