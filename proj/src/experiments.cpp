#include "ampcs/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "ampcs/amp.hpp"
#include "ampcs/bamp.hpp"
#include "ampcs/bossamp.hpp"

namespace ampcs {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kAmp:
      return "amp";
    case Algorithm::kCBamp:
      return "cbamp";
    case Algorithm::kCBossamp:
      return "cbossamp";
  }
  return "unknown";
}

std::string to_string(Detector d) {
  switch (d) {
    case Detector::kNone:
      return "none";
    case Detector::kPrior:
      return "prior";
    case Detector::kEm:
      return "em";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "amp") return Algorithm::kAmp;
  if (name == "cbamp") return Algorithm::kCBamp;
  if (name == "cbossamp") return Algorithm::kCBossamp;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

Detector parse_detector(const std::string& name) {
  if (name == "none") return Detector::kNone;
  if (name == "prior") return Detector::kPrior;
  if (name == "em") return Detector::kEm;
  throw std::invalid_argument("unknown detector '" + name + "'");
}

std::string DetectionConfig::label() const { return to_string(algorithm) + "+" + to_string(detector); }

std::vector<DetectionConfig> default_detection_configs() {
  return {{Algorithm::kCBamp, Detector::kEm},
          {Algorithm::kCBossamp, Detector::kEm},
          {Algorithm::kCBossamp, Detector::kPrior}};
}

std::vector<double> default_axis() {
  std::vector<double> axis;
  for (int i = 1; i <= 19; ++i) axis.push_back(0.05 * i);
  return axis;
}

void GridConfig::validate() const {
  if (N < 1) throw std::invalid_argument("grid: N must be >= 1");
  if (trials < 1) throw std::invalid_argument("grid: trials must be >= 1");
  if (mn_axis.empty() || km_axis.empty()) throw std::invalid_argument("grid: empty axis");
  if (algorithms.empty()) throw std::invalid_argument("grid: no algorithms");
  for (double v : mn_axis) {
    if (!(v > 0.0 && v <= 1.0)) throw std::invalid_argument("grid: M/N values must lie in (0,1]");
  }
  for (double v : km_axis) {
    if (!(v > 0.0 && v <= 1.0)) throw std::invalid_argument("grid: K/M values must lie in (0,1]");
  }
  if (!(success_threshold > 0.0)) throw std::invalid_argument("grid: success threshold must be > 0");
  if (!(sigma_x2 > 0.0)) throw std::invalid_argument("grid: sigma_x2 must be > 0");
  settings.validate();
}

Eigen::Index GridConfig::measurements(double mn) const {
  return std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(mn * static_cast<double>(N))));
}

Eigen::Index GridConfig::sparsity(double km, Eigen::Index M) const {
  const auto K = static_cast<Eigen::Index>(std::llround(km * static_cast<double>(M)));
  return std::clamp<Eigen::Index>(K, 0, N);
}

void NmseSweepConfig::validate() const {
  if (N < 1 || K < 1 || K > N) throw std::invalid_argument("nmse sweep: need 1 <= K <= N");
  if (M_list.empty() || snr_db.empty()) throw std::invalid_argument("nmse sweep: empty M or SNR list");
  for (auto M : M_list) {
    if (M < 1) throw std::invalid_argument("nmse sweep: M must be >= 1");
  }
  if (trials < 1) throw std::invalid_argument("nmse sweep: trials must be >= 1");
  if (algorithms.empty()) throw std::invalid_argument("nmse sweep: no algorithms");
  if (!(sigma_x2 > 0.0)) throw std::invalid_argument("nmse sweep: sigma_x2 must be > 0");
  settings.validate();
}

std::vector<SweepRow> SweepResult::rows_for(const std::string& label) const {
  std::vector<SweepRow> out;
  std::copy_if(rows.begin(), rows.end(), std::back_inserter(out),
               [&](const SweepRow& r) { return r.label == label; });
  return out;
}

double SweepResult::grid_average(const std::string& label) const {
  const auto selected = rows_for(label);
  if (selected.empty()) throw std::invalid_argument("no rows labelled '" + label + "'");
  double total = 0.0;
  for (const auto& r : selected) total += r.success_rate();
  return total / static_cast<double>(selected.size());
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Runs task(i) for i in [0, count) on `workers` threads. Results must be written
// to per-index slots by the task itself.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task) {
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(threads, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

class ProgressSink {
 public:
  explicit ProgressSink(const ExecutionOptions& exec) : exec_(exec) {}
  void operator()(const std::string& line) {
    if (!exec_.progress) return;
    std::lock_guard lock(mutex_);
    exec_.progress(line);
  }

 private:
  const ExecutionOptions& exec_;
  std::mutex mutex_;
};

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

// NMSE, or the raw squared error when the reference signal is zero.
double error_of(const ComplexVector& x_hat, const ComplexVector& x) {
  if (x.squared_norm() > 0.0) return nmse(x_hat, x);
  return x_hat.squared_norm();
}

struct Accumulator {
  int trials = 0;
  int successes = 0;
  int divergences = 0;
  double iterations = 0.0;
  std::vector<double> errors;

  void add(bool success, bool failed, int iters, double error) {
    ++trials;
    if (success) ++successes;
    if (failed) ++divergences;
    iterations += iters;
    errors.push_back(error);
  }

  void fill(SweepRow& row) const {
    row.trials = trials;
    row.successes = successes;
    row.divergences = divergences;
    row.mean_iterations = trials > 0 ? iterations / trials : 0.0;
    double total = 0.0;
    for (double e : errors) total += e;
    row.nmse_mean = errors.empty() ? 0.0 : total / static_cast<double>(errors.size());
    row.nmse_median = median(errors);
  }
};

std::vector<std::pair<std::string, std::string>> settings_echo(const RecoverySettings& s) {
  return {{"t_max", fmt::format("{}", s.t_max)},
          {"eps_tol", fmt::format("{}", s.eps_tol)},
          {"beta_floor", fmt::format("{}", s.beta_floor)},
          {"gamma_clamp", fmt::format("{}", s.gamma_clamp)},
          {"divergence_factor", fmt::format("{}", s.divergence_factor)},
          {"likelihood_variant",
           s.likelihood_variant == LikelihoodVariant::kOwnBeta ? "own-beta" : "printed-cross-beta"},
          {"part_variance", s.likelihood_part_variance == PartVariance::kHalf ? "half" : "full"},
          {"exchange", s.exchange ? "on" : "off"}};
}

std::string join_axis(const std::vector<double>& axis) {
  std::string out;
  for (std::size_t i = 0; i < axis.size(); ++i) out += (i ? ";" : "") + fmt::format("{}", axis[i]);
  return out;
}

std::vector<std::pair<std::string, std::string>> grid_echo(const GridConfig& cfg) {
  std::string algos;
  for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) algos += (i ? ";" : "") + to_string(cfg.algorithms[i]);
  std::vector<std::pair<std::string, std::string>> echo{
      {"N", fmt::format("{}", cfg.N)},
      {"mn_axis", join_axis(cfg.mn_axis)},
      {"km_axis", join_axis(cfg.km_axis)},
      {"trials", fmt::format("{}", cfg.trials)},
      {"seed", fmt::format("{}", cfg.seed)},
      {"algorithms", algos},
      {"success_threshold", fmt::format("{}", cfg.success_threshold)},
      {"noiseless", cfg.noiseless ? "true" : "false"},
      {"snr_db", fmt::format("{}", cfg.snr_db)},
      {"sigma_x2", fmt::format("{}", cfg.sigma_x2)}};
  for (auto& kv : settings_echo(cfg.settings)) echo.push_back(std::move(kv));
  return echo;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t trial) {
  return splitmix64(splitmix64(splitmix64(base) ^ cell) ^ (trial * 0xd1b54a32d192ed03ULL));
}

ProblemInstance make_instance(Eigen::Index N, Eigen::Index M, Eigen::Index K, double sigma_x2,
                              bool noiseless, double snr_db, std::uint64_t seed) {
  Rng rng(seed);
  ProblemInstance instance;
  instance.seed = seed;
  instance.A = gen_matrix(M, N, rng);
  instance.x_true = gen_signal_exact_k(N, K, sigma_x2, rng);
  instance.prior = BernoulliGaussianPrior::uniform(
      N, 1.0 - static_cast<double>(K) / static_cast<double>(N), sigma_x2);
  if (noiseless || K == 0) {
    instance.w = ComplexVector::zeros(M);
    instance.sigma_w2 = 0.0;
  } else {
    auto noise = calibrate_noise(instance.A, instance.x_true, db_to_linear(snr_db), rng);
    instance.w = std::move(noise.w);
    instance.sigma_w2 = noise.sigma_w2;
  }
  instance.y = measure(instance.A, instance.x_true, instance.w);
  return instance;
}

RecoveryOutput run_algorithm(Algorithm algorithm, const ProblemInstance& instance, Eigen::Index K,
                             const RecoverySettings& settings) {
  switch (algorithm) {
    case Algorithm::kAmp:
      return camp_recover(instance.A, instance.y,
                          AmpConfig::for_sparsity(std::max<Eigen::Index>(K, 1), settings));
    case Algorithm::kCBamp:
      return cbamp_recover(instance.A, instance.y, instance.prior, settings);
    case Algorithm::kCBossamp:
      return cbossamp_recover(instance.A, instance.y, instance.prior, settings);
  }
  throw std::invalid_argument("run_algorithm: unknown algorithm");
}

SupportEstimate detect_support(Detector detector, const RecoveryOutput& out,
                               const BernoulliGaussianPrior& prior, double gamma_clamp) {
  const Vector& gamma_re = out.gamma_re.size() > 0 ? out.gamma_re : prior.gamma0;
  const Vector& gamma_im = out.gamma_im.size() > 0 ? out.gamma_im : prior.gamma0;
  switch (detector) {
    case Detector::kNone:
      return SupportEstimate::of(out.x_hat);
    case Detector::kPrior:
      return detect_prior_based(gamma_re, gamma_im);
    case Detector::kEm:
      return detect_em(EmInputs{out.real.u, out.imag.u, out.real.beta, out.imag.beta, gamma_re,
                                gamma_im, prior.sigma_x2, gamma_clamp});
  }
  throw std::invalid_argument("detect_support: unknown detector");
}

SweepResult run_phase_transition(const GridConfig& cfg, const ExecutionOptions& exec) {
  cfg.validate();
  const std::size_t n_km = cfg.km_axis.size();
  const std::size_t cells = cfg.mn_axis.size() * n_km;
  const std::size_t n_alg = cfg.algorithms.size();
  std::vector<SweepRow> rows(cells * n_alg);
  ProgressSink progress(exec);

  parallel_for(cells, exec.workers, [&](std::size_t cell) {
    const double mn = cfg.mn_axis[cell / n_km];
    const double km = cfg.km_axis[cell % n_km];
    const Eigen::Index M = cfg.measurements(mn);
    const Eigen::Index K = cfg.sparsity(km, M);
    std::vector<Accumulator> acc(n_alg);
    for (int trial = 0; trial < cfg.trials; ++trial) {
      const auto instance = make_instance(cfg.N, M, K, cfg.sigma_x2, cfg.noiseless, cfg.snr_db,
                                          trial_seed(cfg.seed, cell, static_cast<std::uint64_t>(trial)));
      for (std::size_t a = 0; a < n_alg; ++a) {
        const auto out = run_algorithm(cfg.algorithms[a], instance, K, cfg.settings);
        const double error = error_of(out.x_hat, instance.x_true);
        acc[a].add(!out.failed() && error < cfg.success_threshold, out.failed(), out.iterations, error);
      }
    }
    for (std::size_t a = 0; a < n_alg; ++a) {
      SweepRow& row = rows[cell * n_alg + a];
      row.mn = mn;
      row.km = km;
      row.M = M;
      row.K = K;
      row.noiseless = cfg.noiseless;
      row.snr_db = cfg.snr_db;
      row.label = to_string(cfg.algorithms[a]);
      row.seed = cfg.seed;
      acc[a].fill(row);
    }
    progress(fmt::format("cell {}/{} M/N={} K/M={} M={} K={}", cell + 1, cells, mn, km, M, K));
  });

  SweepResult result;
  result.kind = "phase-transition";
  result.config = grid_echo(cfg);
  result.rows = std::move(rows);
  return result;
}

SweepResult run_support_phase_transition(const GridConfig& cfg,
                                         const std::vector<DetectionConfig>& detectors,
                                         const ExecutionOptions& exec) {
  cfg.validate();
  if (detectors.empty()) throw std::invalid_argument("support sweep: no detector configurations");
  // Each distinct algorithm runs once per trial; detectors share its output.
  std::vector<Algorithm> algorithms;
  for (const auto& d : detectors) {
    if (std::find(algorithms.begin(), algorithms.end(), d.algorithm) == algorithms.end()) {
      algorithms.push_back(d.algorithm);
    }
  }

  const std::size_t n_km = cfg.km_axis.size();
  const std::size_t cells = cfg.mn_axis.size() * n_km;
  const std::size_t n_det = detectors.size();
  std::vector<SweepRow> rows(cells * n_det);
  ProgressSink progress(exec);

  parallel_for(cells, exec.workers, [&](std::size_t cell) {
    const double mn = cfg.mn_axis[cell / n_km];
    const double km = cfg.km_axis[cell % n_km];
    const Eigen::Index M = cfg.measurements(mn);
    const Eigen::Index K = cfg.sparsity(km, M);
    std::vector<Accumulator> acc(n_det);
    for (int trial = 0; trial < cfg.trials; ++trial) {
      const auto instance = make_instance(cfg.N, M, K, cfg.sigma_x2, cfg.noiseless, cfg.snr_db,
                                          trial_seed(cfg.seed, cell, static_cast<std::uint64_t>(trial)));
      std::vector<RecoveryOutput> outputs;
      for (auto algorithm : algorithms) outputs.push_back(run_algorithm(algorithm, instance, K, cfg.settings));
      for (std::size_t d = 0; d < n_det; ++d) {
        const auto idx = static_cast<std::size_t>(
            std::find(algorithms.begin(), algorithms.end(), detectors[d].algorithm) - algorithms.begin());
        const RecoveryOutput& out = outputs[idx];
        const auto support = detect_support(detectors[d].detector, out, instance.prior, cfg.settings.gamma_clamp);
        const auto metrics = support_metrics(instance.x_true, support);
        const double error = error_of(apply_support(out.x_hat, support), instance.x_true);
        acc[d].add(metrics.exact_match, out.failed(), out.iterations, error);
      }
    }
    for (std::size_t d = 0; d < n_det; ++d) {
      SweepRow& row = rows[cell * n_det + d];
      row.mn = mn;
      row.km = km;
      row.M = M;
      row.K = K;
      row.noiseless = cfg.noiseless;
      row.snr_db = cfg.snr_db;
      row.label = detectors[d].label();
      row.seed = cfg.seed;
      acc[d].fill(row);
    }
    progress(fmt::format("cell {}/{} M/N={} K/M={} M={} K={}", cell + 1, cells, mn, km, M, K));
  });

  SweepResult result;
  result.kind = "support-pt";
  result.config = grid_echo(cfg);
  std::string labels;
  for (std::size_t d = 0; d < n_det; ++d) labels += (d ? ";" : "") + detectors[d].label();
  result.config.emplace_back("detectors", labels);
  result.rows = std::move(rows);
  return result;
}

SweepResult run_nmse_sweep(const NmseSweepConfig& cfg, const ExecutionOptions& exec) {
  cfg.validate();
  const std::size_t n_snr = cfg.snr_db.size();
  const std::size_t points = cfg.M_list.size() * n_snr;
  const std::size_t n_alg = cfg.algorithms.size();
  std::vector<SweepRow> rows(points * n_alg);
  ProgressSink progress(exec);

  parallel_for(points, exec.workers, [&](std::size_t point) {
    const Eigen::Index M = cfg.M_list[point / n_snr];
    const double snr_db = cfg.snr_db[point % n_snr];
    std::vector<Accumulator> acc(n_alg);
    for (int trial = 0; trial < cfg.trials; ++trial) {
      const auto instance = make_instance(cfg.N, M, cfg.K, cfg.sigma_x2, false, snr_db,
                                          trial_seed(cfg.seed, point, static_cast<std::uint64_t>(trial)));
      for (std::size_t a = 0; a < n_alg; ++a) {
        const auto out = run_algorithm(cfg.algorithms[a], instance, cfg.K, cfg.settings);
        acc[a].add(!out.failed(), out.failed(), out.iterations, nmse(out.x_hat, instance.x_true));
      }
    }
    for (std::size_t a = 0; a < n_alg; ++a) {
      SweepRow& row = rows[point * n_alg + a];
      row.mn = static_cast<double>(M) / static_cast<double>(cfg.N);
      row.km = static_cast<double>(cfg.K) / static_cast<double>(M);
      row.M = M;
      row.K = cfg.K;
      row.noiseless = false;
      row.snr_db = snr_db;
      row.label = to_string(cfg.algorithms[a]);
      row.seed = cfg.seed;
      acc[a].fill(row);
    }
    progress(fmt::format("point {}/{} M={} SNR={} dB", point + 1, points, M, snr_db));
  });

  SweepResult result;
  result.kind = "nmse-sweep";
  std::string algos, ms, snrs;
  for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) algos += (i ? ";" : "") + to_string(cfg.algorithms[i]);
  for (std::size_t i = 0; i < cfg.M_list.size(); ++i) ms += (i ? ";" : "") + fmt::format("{}", cfg.M_list[i]);
  result.config = {{"N", fmt::format("{}", cfg.N)},         {"K", fmt::format("{}", cfg.K)},
                   {"M", ms},                               {"snr_db", join_axis(cfg.snr_db)},
                   {"trials", fmt::format("{}", cfg.trials)}, {"seed", fmt::format("{}", cfg.seed)},
                   {"algorithms", algos},                   {"sigma_x2", fmt::format("{}", cfg.sigma_x2)}};
  for (auto& kv : settings_echo(cfg.settings)) result.config.push_back(std::move(kv));
  result.rows = std::move(rows);
  return result;
}

std::vector<ContourPoint> extract_contour(const SweepResult& result, double level) {
  if (result.rows.empty()) throw std::invalid_argument("extract_contour: empty result");

  // Columns keyed by (label, M/N) in first-appearance order.
  std::vector<std::pair<std::string, double>> keys;
  for (const auto& r : result.rows) {
    const std::pair<std::string, double> key{r.label, r.mn};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }

  std::vector<ContourPoint> contour;
  for (const auto& [label, mn] : keys) {
    std::vector<std::pair<double, double>> column;  // (K/M, rate)
    for (const auto& r : result.rows) {
      if (r.label == label && r.mn == mn) column.emplace_back(r.km, r.success_rate());
    }
    std::sort(column.begin(), column.end());
    for (std::size_t i = 0; i + 1 < column.size(); ++i) {
      const auto [k0, r0] = column[i];
      const auto [k1, r1] = column[i + 1];
      if (r0 >= level && r1 < level) {
        const double t = (r0 - level) / (r0 - r1);
        contour.push_back({label, mn, k0 + t * (k1 - k0)});
        break;
      }
    }
  }
  return contour;
}

std::string version_string() { return fmt::format("ampcs {}", AMPCS_VERSION); }

}  // namespace ampcs
