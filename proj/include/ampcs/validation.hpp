#pragma once

// Oracle checks behind `ampcs validate-denoiser`: the closed-form denoiser
// against quadrature, and the recovery algorithms against exact enumeration
// MMSE on small instances.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ampcs/denoiser.hpp"
#include "ampcs/experiments.hpp"

namespace ampcs {

using ClosedFormDenoiser = std::function<double(double, const DenoiserParams&)>;

struct DenoiserGridConfig {
  std::vector<double> u_grid;  // defaults to 50 points on [-5, 5]
  std::vector<double> betas{1e-3, 1e-1, 1.0, 10.0};
  std::vector<double> gammas{0.01, 0.5, 0.9, 0.99};
  double s2 = 0.5;
  double tolerance = 1e-8;

  DenoiserGridConfig();
};

struct DenoiserGridPoint {
  double u = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double closed_form = 0.0;
  double quadrature = 0.0;
  double abs_diff = 0.0;
};

struct DenoiserGridReport {
  std::vector<DenoiserGridPoint> points;
  double max_abs_diff = 0.0;
  double tolerance = 0.0;
  bool passed = false;

  std::vector<DenoiserGridPoint> worst(std::size_t count) const;
};

DenoiserGridReport validate_denoiser_grid(const DenoiserGridConfig& cfg,
                                          const ClosedFormDenoiser& closed_form = denoise);

void write_denoiser_csv(const DenoiserGridReport& report, std::ostream& out);

struct MmseCheckConfig {
  Eigen::Index N = 10;
  Eigen::Index M = 6;
  Eigen::Index K = 2;  // expected number of nonzeros; gamma0 = 1 - K/N
  int trials = 500;
  bool noiseless = true;
  double snr_db = 20.0;
  double sigma_x2 = 1.0;
  std::uint64_t seed = 7;
  double slack = 1e-9;
  std::vector<Algorithm> algorithms{Algorithm::kAmp, Algorithm::kCBamp, Algorithm::kCBossamp};
  RecoverySettings settings;
};

struct MmseCheckRow {
  std::string algorithm;
  std::string oracle;  // "per-part" or "joint"
  double mse_re = 0.0;
  double mse_im = 0.0;
  double oracle_mse_re = 0.0;
  double oracle_mse_im = 0.0;
  double gap_re = 0.0;  // mean paired (algorithm - oracle) squared error
  double gap_im = 0.0;
  bool passed = false;
};

struct MmseCheckReport {
  std::vector<MmseCheckRow> rows;
  double oracle_mse_part = 0.0;   // per-part enumeration oracle, averaged over parts
  double oracle_mse_joint = 0.0;  // joint-support enumeration oracle
  bool passed = false;
};

/// Signals follow the Bernoulli-Gaussian prior exactly and the noise variance is
/// fixed at E||Ax||^2 / (M snr), so the enumeration oracles are the true posterior
/// means. Algorithms that treat the parts independently are compared with the
/// per-part oracle; cBOSSAMP, which couples them, with the joint oracle.
MmseCheckReport check_against_exact_mmse(const MmseCheckConfig& cfg);

}  // namespace ampcs
