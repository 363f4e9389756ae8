#include "ampcs/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace ampcs {

RealMatrix::RealMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw std::invalid_argument("RealMatrix: dimensions must be positive");
  }
}

bool RealMatrix::operator==(const RealMatrix& other) const {
  return values_.rows() == other.values_.rows() && values_.cols() == other.values_.cols() &&
         values_ == other.values_;
}

ComplexVector::ComplexVector(Vector real_part, Vector imag_part)
    : re(std::move(real_part)), im(std::move(imag_part)) {
  if (re.size() != im.size()) {
    throw std::invalid_argument("ComplexVector: real and imaginary parts differ in length");
  }
}

ComplexVector ComplexVector::zeros(Eigen::Index n) {
  return ComplexVector(Vector::Zero(n), Vector::Zero(n));
}

bool ComplexVector::operator==(const ComplexVector& other) const {
  return re.size() == other.re.size() && re == other.re && im == other.im;
}

BernoulliGaussianPrior BernoulliGaussianPrior::uniform(Eigen::Index n, double gamma0,
                                                       double sigma_x2) {
  BernoulliGaussianPrior prior{Vector::Constant(n, gamma0), sigma_x2};
  prior.validate();
  return prior;
}

void BernoulliGaussianPrior::validate() const {
  if (!(sigma_x2 > 0.0) || !std::isfinite(sigma_x2)) {
    throw std::invalid_argument("BernoulliGaussianPrior: sigma_x2 must be positive");
  }
  for (Eigen::Index n = 0; n < gamma0.size(); ++n) {
    if (!(gamma0[n] >= 0.0 && gamma0[n] <= 1.0)) {
      throw std::invalid_argument("BernoulliGaussianPrior: gamma0 entries must lie in [0,1]");
    }
  }
}

bool ProblemInstance::is_consistent(double tol) const {
  if (y.size() != A.rows() || x_true.size() != A.cols() || w.size() != A.rows()) return false;
  const ComplexVector expected = measure(A, x_true, w);
  const double scale = std::max(1.0, y.squared_norm());
  return (expected.re - y.re).squaredNorm() + (expected.im - y.im).squaredNorm() <=
         tol * tol * scale;
}

void RecoverySettings::validate() const {
  if (t_max < 1) throw std::invalid_argument("RecoverySettings: t_max must be >= 1");
  if (!(eps_tol > 0.0)) throw std::invalid_argument("RecoverySettings: eps_tol must be > 0");
  if (!(beta_floor > 0.0)) throw std::invalid_argument("RecoverySettings: beta_floor must be > 0");
  if (!(gamma_clamp > 0.0 && gamma_clamp < 0.5)) {
    throw std::invalid_argument("RecoverySettings: gamma_clamp must lie in (0, 0.5)");
  }
  if (!(divergence_factor > 1.0)) {
    throw std::invalid_argument("RecoverySettings: divergence_factor must be > 1");
  }
}

std::string to_string(RecoveryStatus status) {
  switch (status) {
    case RecoveryStatus::kConverged:
      return "converged";
    case RecoveryStatus::kMaxIterations:
      return "max_iterations";
    case RecoveryStatus::kDiverged:
      return "diverged";
    case RecoveryStatus::kNonFinite:
      return "non_finite";
  }
  return "unknown";
}

RecoveryStatus worst(RecoveryStatus a, RecoveryStatus b) {
  return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

RealMatrix gen_matrix(Eigen::Index M, Eigen::Index N, Rng& rng) {
  if (M < 1 || N < 1) throw std::invalid_argument("gen_matrix: M and N must be positive");
  const double magnitude = 1.0 / std::sqrt(static_cast<double>(M));
  std::bernoulli_distribution coin(0.5);
  Eigen::MatrixXd values(M, N);
  // Row-major draw order so the stream maps onto the serialized layout.
  for (Eigen::Index m = 0; m < M; ++m) {
    for (Eigen::Index n = 0; n < N; ++n) {
      values(m, n) = coin(rng) ? magnitude : -magnitude;
    }
  }
  return RealMatrix(std::move(values));
}

ComplexVector gen_signal_exact_k(Eigen::Index N, Eigen::Index K, double sigma_x2, Rng& rng) {
  if (N < 1) throw std::invalid_argument("gen_signal_exact_k: N must be positive");
  if (K < 0 || K > N) throw std::invalid_argument("gen_signal_exact_k: need 0 <= K <= N");
  if (!(sigma_x2 > 0.0)) throw std::invalid_argument("gen_signal_exact_k: sigma_x2 must be > 0");

  std::vector<Eigen::Index> index(static_cast<std::size_t>(N));
  std::iota(index.begin(), index.end(), Eigen::Index{0});
  // Partial Fisher-Yates: the first K slots become a uniform random K-subset.
  for (Eigen::Index k = 0; k < K; ++k) {
    std::uniform_int_distribution<Eigen::Index> pick(k, N - 1);
    std::swap(index[static_cast<std::size_t>(k)], index[static_cast<std::size_t>(pick(rng))]);
  }
  std::sort(index.begin(), index.begin() + K);

  std::normal_distribution<double> amplitude(0.0, std::sqrt(0.5 * sigma_x2));
  ComplexVector x = ComplexVector::zeros(N);
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto n = index[static_cast<std::size_t>(k)];
    x.re[n] = amplitude(rng);
    x.im[n] = amplitude(rng);
  }
  return x;
}

ComplexVector gen_signal_bernoulli(const BernoulliGaussianPrior& prior, Rng& rng) {
  prior.validate();
  const Eigen::Index N = prior.gamma0.size();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> amplitude(0.0, std::sqrt(prior.part_variance()));
  ComplexVector x = ComplexVector::zeros(N);
  for (Eigen::Index n = 0; n < N; ++n) {
    const bool active = unit(rng) >= prior.gamma0[n];
    if (active) {
      x.re[n] = amplitude(rng);
      x.im[n] = amplitude(rng);
    }
  }
  return x;
}

ComplexVector measure(const RealMatrix& A, const ComplexVector& x, const ComplexVector& w) {
  if (x.size() != A.cols() || w.size() != A.rows()) {
    throw std::invalid_argument("measure: dimension mismatch");
  }
  Vector y_re = A.eigen() * x.re + w.re;
  Vector y_im = A.eigen() * x.im + w.im;
  return ComplexVector(std::move(y_re), std::move(y_im));
}

ComplexVector gen_noise(Eigen::Index M, double sigma_w2, Rng& rng) {
  if (!(sigma_w2 >= 0.0)) throw std::invalid_argument("gen_noise: sigma_w2 must be >= 0");
  ComplexVector w = ComplexVector::zeros(M);
  if (sigma_w2 == 0.0) return w;
  std::normal_distribution<double> noise(0.0, std::sqrt(0.5 * sigma_w2));
  for (Eigen::Index m = 0; m < M; ++m) w.re[m] = noise(rng);
  for (Eigen::Index m = 0; m < M; ++m) w.im[m] = noise(rng);
  return w;
}

CalibratedNoise calibrate_noise(const RealMatrix& A, const ComplexVector& x, double snr,
                                Rng& rng) {
  if (!(snr > 0.0) || !std::isfinite(snr)) {
    throw std::invalid_argument("calibrate_noise: snr must be positive and finite");
  }
  const ComplexVector clean = measure(A, x, ComplexVector::zeros(A.rows()));
  const double energy = clean.squared_norm();
  if (!(energy > 0.0)) throw std::invalid_argument("calibrate_noise: A x is zero");
  const double sigma_w2 = energy / (static_cast<double>(A.rows()) * snr);
  return CalibratedNoise{gen_noise(A.rows(), sigma_w2, rng), sigma_w2};
}

double nmse(const ComplexVector& x_hat, const ComplexVector& x) {
  if (x_hat.size() != x.size()) throw std::invalid_argument("nmse: length mismatch");
  const double reference = x.squared_norm();
  if (!(reference > 0.0)) throw std::invalid_argument("nmse: reference signal is zero");
  return ((x_hat.re - x.re).squaredNorm() + (x_hat.im - x.im).squaredNorm()) / reference;
}

ComplexVector combine(Vector x_re, Vector x_im) {
  return ComplexVector(std::move(x_re), std::move(x_im));
}

std::pair<Vector, Vector> split(const ComplexVector& x) { return {x.re, x.im}; }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double value) { return 10.0 * std::log10(value); }

}  // namespace ampcs
