#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "ampcs/model.hpp"

namespace ampcs::detail {

// State of one real-valued message-passing chain. Each step performs
//   u    = x_hat + A^T z
//   beta = ||z||^2 / M                 (floored)
//   x'   = eta(u; beta)
//   z'   = y - A x' + (1/M) z sum_n eta'(u_n; beta)
// The nonlinearity writes x' and returns the derivative sum.
class Chain {
 public:
  Chain(const Eigen::MatrixXd& A, const Vector& y, const RecoverySettings& settings)
      : A_(A),
        y_(y),
        settings_(settings),
        x_hat_(Vector::Zero(A.cols())),
        z_(y),
        u_(Vector::Zero(A.cols())),
        x_next_(A.cols()),
        z_next_(A.rows()),
        y_energy_(y.squaredNorm()),
        beta_(std::max(y.squaredNorm() / static_cast<double>(A.rows()), settings.beta_floor)) {}

  template <class Nonlinearity>
  void step(Nonlinearity&& eta) {
    const double inv_m = 1.0 / static_cast<double>(A_.rows());
    ++t_;
    u_ = x_hat_;
    u_.noalias() += A_.transpose() * z_;
    const double z_energy = z_.squaredNorm();
    beta_ = std::max(z_energy * inv_m, settings_.beta_floor);
    if (!u_.allFinite()) {
      fail(RecoveryStatus::kNonFinite, "non-finite u");
      return;
    }

    const double derivative_sum = eta(u_, beta_, x_next_);
    onsager_ = derivative_sum * inv_m;
    z_next_ = y_;
    z_next_.noalias() -= A_ * x_next_;
    z_next_ += onsager_ * z_;
    if (!std::isfinite(derivative_sum) || !x_next_.allFinite() || !z_next_.allFinite()) {
      fail(RecoveryStatus::kNonFinite, "non-finite estimate or residual");
      return;
    }

    const double delta = (z_next_ - z_).squaredNorm();
    if (z_energy > 0.0) {
      change_ = delta / z_energy;
    } else {
      change_ = delta > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    std::swap(x_hat_, x_next_);
    std::swap(z_, z_next_);

    if (z_.squaredNorm() > settings_.divergence_factor * y_energy_) {
      fail(RecoveryStatus::kDiverged, "residual energy exceeded the divergence bound");
    }
  }

  bool failed() const { return status_ == RecoveryStatus::kDiverged || status_ == RecoveryStatus::kNonFinite; }
  bool settled() const { return !failed() && t_ > 0 && change_ <= settings_.eps_tol; }
  bool can_continue() const { return !failed() && !settled() && t_ < settings_.t_max; }

  int iterations() const { return t_; }
  double change() const { return change_; }
  double beta() const { return beta_; }
  double onsager() const { return onsager_; }
  const Vector& u() const { return u_; }
  const Vector& x_hat() const { return x_hat_; }
  const Vector& z() const { return z_; }

  PartRecovery result() const {
    PartRecovery out;
    out.x_hat = x_hat_;
    out.u = u_;
    out.beta = beta_;
    out.iterations = t_;
    out.diagnostic = diagnostic_;
    if (failed()) {
      out.status = status_;
    } else {
      out.status = settled() ? RecoveryStatus::kConverged : RecoveryStatus::kMaxIterations;
    }
    return out;
  }

 private:
  void fail(RecoveryStatus status, const char* what) {
    status_ = status;
    diagnostic_ = std::string(what) + " at iteration " + std::to_string(t_);
  }

  const Eigen::MatrixXd& A_;
  const Vector& y_;
  const RecoverySettings& settings_;
  Vector x_hat_;
  Vector z_;
  Vector u_;
  Vector x_next_;
  Vector z_next_;
  double y_energy_;
  double beta_;
  double change_ = std::numeric_limits<double>::infinity();
  double onsager_ = 0.0;
  int t_ = 0;
  RecoveryStatus status_ = RecoveryStatus::kMaxIterations;
  std::string diagnostic_;
};

}  // namespace ampcs::detail
