#pragma once

// Soft-thresholding AMP with threshold lambda * sqrt(beta), beta = ||z||^2 / M.

#include "ampcs/model.hpp"

namespace ampcs {

struct AmpConfig {
  double lambda = 1.0;
  RecoverySettings settings;

  /// Uses lambda_heuristic(K).
  static AmpConfig for_sparsity(Eigen::Index K, RecoverySettings settings = {});
  void validate() const;
};

/// sign(u) max(|u| - theta, 0).
double soft_threshold(double u, double theta);

/// 2.678 K^-0.181.
double lambda_heuristic(Eigen::Index K);

PartRecovery amp_recover(const RealMatrix& A, const Vector& y_part, const AmpConfig& cfg);

/// amp_recover on each part independently; gamma outputs are empty.
RecoveryOutput camp_recover(const RealMatrix& A, const ComplexVector& y, const AmpConfig& cfg);

}  // namespace ampcs
