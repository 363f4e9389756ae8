#include "ampcs/validation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "ampcs/amp.hpp"
#include "ampcs/exact_mmse.hpp"

namespace ampcs {

DenoiserGridConfig::DenoiserGridConfig() {
  constexpr int kPoints = 50;
  for (int i = 0; i < kPoints; ++i) u_grid.push_back(-5.0 + 10.0 * i / (kPoints - 1));
}

std::vector<DenoiserGridPoint> DenoiserGridReport::worst(std::size_t count) const {
  std::vector<DenoiserGridPoint> sorted = points;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.abs_diff > b.abs_diff; });
  sorted.resize(std::min(count, sorted.size()));
  return sorted;
}

DenoiserGridReport validate_denoiser_grid(const DenoiserGridConfig& cfg,
                                          const ClosedFormDenoiser& closed_form) {
  DenoiserGridReport report;
  report.tolerance = cfg.tolerance;
  for (double beta : cfg.betas) {
    for (double gamma : cfg.gammas) {
      const DenoiserParams p{beta, gamma, cfg.s2};
      for (double u : cfg.u_grid) {
        DenoiserGridPoint point{u, beta, gamma, closed_form(u, p), denoise_numeric(u, p), 0.0};
        point.abs_diff = std::abs(point.closed_form - point.quadrature);
        if (!std::isfinite(point.abs_diff)) point.abs_diff = HUGE_VAL;
        report.max_abs_diff = std::max(report.max_abs_diff, point.abs_diff);
        report.points.push_back(point);
      }
    }
  }
  report.passed = report.max_abs_diff <= cfg.tolerance;
  return report;
}

void write_denoiser_csv(const DenoiserGridReport& report, std::ostream& out) {
  out << "# " << version_string() << " kind=validate-denoiser tolerance=" << report.tolerance
      << " max_abs_diff=" << report.max_abs_diff << '\n';
  out << "u,beta,gamma,closed_form,quadrature,abs_diff\n";
  for (const auto& p : report.points) {
    out << fmt::format("{},{},{},{},{},{}\n", p.u, p.beta, p.gamma, p.closed_form, p.quadrature,
                       p.abs_diff);
  }
}

MmseCheckReport check_against_exact_mmse(const MmseCheckConfig& cfg) {
  const double gamma0 = 1.0 - static_cast<double>(cfg.K) / static_cast<double>(cfg.N);
  const auto prior = BernoulliGaussianPrior::uniform(cfg.N, gamma0, cfg.sigma_x2);
  const double sigma_w2 =
      cfg.noiseless ? 0.0
                    : static_cast<double>(cfg.N) * (1.0 - gamma0) * cfg.sigma_x2 /
                          (static_cast<double>(cfg.M) * db_to_linear(cfg.snr_db));

  const std::size_t n_alg = cfg.algorithms.size();
  std::vector<double> alg_re(n_alg, 0.0), alg_im(n_alg, 0.0);
  double part_re = 0.0, part_im = 0.0, joint_re = 0.0, joint_im = 0.0;
  const double inv_n = 1.0 / static_cast<double>(cfg.N);

  for (int trial = 0; trial < cfg.trials; ++trial) {
    Rng rng(trial_seed(cfg.seed, 0, static_cast<std::uint64_t>(trial)));
    ProblemInstance instance;
    instance.A = gen_matrix(cfg.M, cfg.N, rng);
    instance.x_true = gen_signal_bernoulli(prior, rng);
    instance.w = gen_noise(cfg.M, sigma_w2, rng);
    instance.y = measure(instance.A, instance.x_true, instance.w);
    instance.prior = prior;
    instance.sigma_w2 = sigma_w2;

    const Vector oracle_re = exact_mmse(instance.A, instance.y.re, prior, 0.5 * sigma_w2);
    const Vector oracle_im = exact_mmse(instance.A, instance.y.im, prior, 0.5 * sigma_w2);
    const auto [joint_est_re, joint_est_im] = exact_mmse_joint(instance.A, instance.y, prior, 0.5 * sigma_w2);
    part_re += (oracle_re - instance.x_true.re).squaredNorm() * inv_n;
    part_im += (oracle_im - instance.x_true.im).squaredNorm() * inv_n;
    joint_re += (joint_est_re - instance.x_true.re).squaredNorm() * inv_n;
    joint_im += (joint_est_im - instance.x_true.im).squaredNorm() * inv_n;

    for (std::size_t a = 0; a < n_alg; ++a) {
      const auto out = run_algorithm(cfg.algorithms[a], instance, cfg.K, cfg.settings);
      alg_re[a] += (out.x_hat.re - instance.x_true.re).squaredNorm() * inv_n;
      alg_im[a] += (out.x_hat.im - instance.x_true.im).squaredNorm() * inv_n;
    }
  }

  const double trials = static_cast<double>(cfg.trials);
  MmseCheckReport report;
  report.oracle_mse_part = 0.5 * (part_re + part_im) / trials;
  report.oracle_mse_joint = 0.5 * (joint_re + joint_im) / trials;
  report.passed = true;
  for (std::size_t a = 0; a < n_alg; ++a) {
    const bool joint = cfg.algorithms[a] == Algorithm::kCBossamp;
    MmseCheckRow row;
    row.algorithm = to_string(cfg.algorithms[a]);
    row.oracle = joint ? "joint" : "per-part";
    row.mse_re = alg_re[a] / trials;
    row.mse_im = alg_im[a] / trials;
    row.oracle_mse_re = (joint ? joint_re : part_re) / trials;
    row.oracle_mse_im = (joint ? joint_im : part_im) / trials;
    row.gap_re = row.mse_re - row.oracle_mse_re;
    row.gap_im = row.mse_im - row.oracle_mse_im;
    row.passed = row.gap_re >= -cfg.slack && row.gap_im >= -cfg.slack;
    report.passed = report.passed && row.passed;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace ampcs
