#pragma once

// Support detection after recovery, and comparison against the true support.

#include <cstddef>
#include <vector>

#include "ampcs/model.hpp"

namespace ampcs {

class SupportEstimate {
 public:
  SupportEstimate() = default;
  explicit SupportEstimate(std::vector<bool> active) : active_(std::move(active)) {}

  static SupportEstimate full(std::size_t n) { return SupportEstimate(std::vector<bool>(n, true)); }
  static SupportEstimate empty(std::size_t n) { return SupportEstimate(std::vector<bool>(n, false)); }
  /// Components where either part of x is nonzero.
  static SupportEstimate of(const ComplexVector& x);

  std::size_t size() const { return active_.size(); }
  bool is_active(std::size_t n) const { return active_[n]; }
  std::size_t count() const;
  std::vector<std::size_t> indices() const;
  const std::vector<bool>& mask() const { return active_; }

  bool operator==(const SupportEstimate&) const = default;

 private:
  std::vector<bool> active_;
};

struct SupportMetrics {
  bool exact_match = false;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

/// Zero iff gamma_r gamma_i >= (1 - gamma_r)(1 - gamma_i).
SupportEstimate detect_prior_based(const Vector& gamma_r, const Vector& gamma_i);

struct EmInputs {
  const Vector& u_r;
  const Vector& u_i;
  double beta_r;
  double beta_i;
  const Vector& gamma_r;
  const Vector& gamma_i;
  double sigma_x2;
  double gamma_clamp = 1e-12;
};

/// Single E-step classification: zero iff sigma_00 >= sigma_11, where
///   sigma_00 = g_r g_i N(u_r; 0, beta_r) N(u_i; 0, beta_i)
///   sigma_11 = (1-g_r)(1-g_i) N(u_r; 0, beta_r + sigma_x2/2) N(u_i; 0, beta_i + sigma_x2/2).
SupportEstimate detect_em(const EmInputs& in);

/// detect_em with both gammas set to the prior gamma0.
SupportEstimate detect_em_cbamp(const Vector& u_r, const Vector& u_i, double beta_r, double beta_i,
                                const Vector& gamma0, double sigma_x2, double gamma_clamp = 1e-12);

/// Normalised responsibilities of the four activity hypotheses (00, 01, 10, 11)
/// for one component. Diagnostic only.
struct Responsibilities {
  double r00 = 0.0;
  double r01 = 0.0;
  double r10 = 0.0;
  double r11 = 0.0;
};
std::vector<Responsibilities> em_responsibilities(const EmInputs& in);

/// Sets off-support components of both parts to exactly zero.
ComplexVector apply_support(const ComplexVector& x_hat, const SupportEstimate& s);

SupportMetrics support_metrics(const ComplexVector& true_x, const SupportEstimate& s);

}  // namespace ampcs
