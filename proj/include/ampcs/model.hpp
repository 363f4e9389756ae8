#pragma once

// Domain types for complex compressed sensing through a real measurement
// matrix: y = A x + w with x, w, y complex and A real. Complex quantities are
// held as a pair of parallel real vectors so that the real and imaginary
// measurement channels can be processed separately.

#include <cstdint>
#include <random>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace ampcs {

using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

/// Dense real M x N measurement matrix.
class RealMatrix {
 public:
  RealMatrix() = default;
  explicit RealMatrix(Eigen::MatrixXd values);

  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index cols() const { return values_.cols(); }
  double operator()(Eigen::Index m, Eigen::Index n) const { return values_(m, n); }

  const Eigen::MatrixXd& eigen() const { return values_; }

  bool operator==(const RealMatrix& other) const;

 private:
  Eigen::MatrixXd values_;
};

/// Complex vector stored as (real part, imaginary part).
struct ComplexVector {
  Vector re;
  Vector im;

  ComplexVector() = default;
  ComplexVector(Vector real_part, Vector imag_part);

  static ComplexVector zeros(Eigen::Index n);

  Eigen::Index size() const { return re.size(); }
  /// Squared complex Euclidean norm.
  double squared_norm() const { return re.squaredNorm() + im.squaredNorm(); }
  bool operator==(const ComplexVector& other) const;
};

/// Circularly-symmetric complex Bernoulli-Gaussian prior: component n is zero
/// with probability gamma0[n], otherwise CN(0, sigma_x2).
struct BernoulliGaussianPrior {
  Vector gamma0;
  double sigma_x2 = 1.0;

  /// Broadcasts a scalar zero probability to length n.
  static BernoulliGaussianPrior uniform(Eigen::Index n, double gamma0, double sigma_x2);

  /// Variance of the real (or imaginary) part of an active component.
  double part_variance() const { return 0.5 * sigma_x2; }

  /// Throws std::invalid_argument if any gamma0 lies outside [0,1] or sigma_x2 <= 0.
  void validate() const;
};

/// One recovery problem. Noiseless instances carry w = 0 and sigma_w2 = 0.
struct ProblemInstance {
  RealMatrix A;
  ComplexVector x_true;
  ComplexVector w;
  ComplexVector y;
  BernoulliGaussianPrior prior;
  double sigma_w2 = 0.0;
  std::uint64_t seed = 0;

  /// Re-checks y = A x_true + w on both parts.
  bool is_consistent(double tol = 1e-12) const;
};

enum class LikelihoodVariant { kOwnBeta, kPrintedCrossBeta };
enum class PartVariance { kHalf, kFull };

struct RecoverySettings {
  int t_max = 100;
  double eps_tol = 1e-4;
  double beta_floor = 1e-12;
  double gamma_clamp = 1e-12;
  // A run is flagged diverged once ||z||^2 exceeds this multiple of ||y||^2.
  double divergence_factor = 1e4;
  LikelihoodVariant likelihood_variant = LikelihoodVariant::kOwnBeta;
  PartVariance likelihood_part_variance = PartVariance::kHalf;
  // When false, BOSSAMP never updates its working zero probabilities.
  bool exchange = true;

  void validate() const;
};

enum class RecoveryStatus { kConverged, kMaxIterations, kDiverged, kNonFinite };

std::string to_string(RecoveryStatus status);

/// The more severe of two statuses (non-finite > diverged > max-iterations > converged).
RecoveryStatus worst(RecoveryStatus a, RecoveryStatus b);

/// Result of a single real-valued message-passing run.
struct PartRecovery {
  Vector x_hat;
  Vector u;      // u of the last executed iteration
  double beta = 0.0;  // effective noise variance of the last executed iteration
  int iterations = 0;
  RecoveryStatus status = RecoveryStatus::kMaxIterations;
  std::string diagnostic;

  bool converged() const { return status == RecoveryStatus::kConverged; }
  bool failed() const {
    return status == RecoveryStatus::kDiverged || status == RecoveryStatus::kNonFinite;
  }
};

/// Result of a complex recovery: both parts plus the combined estimate.
struct RecoveryOutput {
  ComplexVector x_hat;
  PartRecovery real;
  PartRecovery imag;
  Vector gamma_re;  // final per-component zero probabilities, real part
  Vector gamma_im;
  int iterations = 0;
  RecoveryStatus status = RecoveryStatus::kMaxIterations;

  bool converged() const { return status == RecoveryStatus::kConverged; }
  bool failed() const {
    return status == RecoveryStatus::kDiverged || status == RecoveryStatus::kNonFinite;
  }
};

/// M x N matrix with i.i.d. entries drawn equiprobably from {-1/sqrt(M), +1/sqrt(M)}.
RealMatrix gen_matrix(Eigen::Index M, Eigen::Index N, Rng& rng);

/// Exactly K nonzeros on a uniformly random support, CN(0, sigma_x2) amplitudes.
ComplexVector gen_signal_exact_k(Eigen::Index N, Eigen::Index K, double sigma_x2, Rng& rng);

/// Independent activity per component with zero probability prior.gamma0[n].
ComplexVector gen_signal_bernoulli(const BernoulliGaussianPrior& prior, Rng& rng);

/// y = A x + w on both parts.
ComplexVector measure(const RealMatrix& A, const ComplexVector& x, const ComplexVector& w);

struct CalibratedNoise {
  ComplexVector w;
  double sigma_w2 = 0.0;
};

/// Complex Gaussian noise whose total variance is ||A x||^2 / (M snr) for this
/// realization; each part gets half of it.
CalibratedNoise calibrate_noise(const RealMatrix& A, const ComplexVector& x, double snr, Rng& rng);

/// Complex Gaussian noise with total variance sigma_w2 per component.
ComplexVector gen_noise(Eigen::Index M, double sigma_w2, Rng& rng);

/// ||x_hat - x||^2 / ||x||^2.
double nmse(const ComplexVector& x_hat, const ComplexVector& x);

ComplexVector combine(Vector x_re, Vector x_im);
std::pair<Vector, Vector> split(const ComplexVector& x);

double db_to_linear(double db);
double linear_to_db(double value);

}  // namespace ampcs
