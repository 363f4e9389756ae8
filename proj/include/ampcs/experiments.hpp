#pragma once

// Monte-Carlo harness: recovery and support-detection phase transitions over an
// (M/N, K/M) grid and NMSE-versus-SNR sweeps. Every trial draws its instance
// from a seed derived only from (base seed, cell index, trial index), and all
// algorithms of a cell run on that same instance, so results do not depend on
// the worker count or on scheduling order.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ampcs/model.hpp"
#include "ampcs/support.hpp"

namespace ampcs {

enum class Algorithm { kAmp, kCBamp, kCBossamp };
enum class Detector { kNone, kPrior, kEm };

std::string to_string(Algorithm a);
std::string to_string(Detector d);
Algorithm parse_algorithm(const std::string& name);
Detector parse_detector(const std::string& name);

struct DetectionConfig {
  Algorithm algorithm = Algorithm::kCBossamp;
  Detector detector = Detector::kPrior;

  std::string label() const;
};

/// cBAMP+EM, cBOSSAMP+EM and cBOSSAMP+prior.
std::vector<DetectionConfig> default_detection_configs();

/// 19 evenly spaced points over [0.05, 0.95].
std::vector<double> default_axis();

struct GridConfig {
  Eigen::Index N = 256;
  std::vector<double> mn_axis = default_axis();
  std::vector<double> km_axis = default_axis();
  int trials = 50;
  std::uint64_t seed = 1;
  std::vector<Algorithm> algorithms{Algorithm::kAmp, Algorithm::kCBamp, Algorithm::kCBossamp};
  double success_threshold = 1e-4;
  bool noiseless = true;
  double snr_db = 40.0;  // only used when noiseless is false
  double sigma_x2 = 1.0;
  RecoverySettings settings;

  void validate() const;
  /// M = round(mn N), at least 1.
  Eigen::Index measurements(double mn) const;
  /// K = round(km M), clamped to [0, N].
  Eigen::Index sparsity(double km, Eigen::Index M) const;
};

struct NmseSweepConfig {
  Eigen::Index N = 500;
  Eigen::Index K = 20;
  std::vector<Eigen::Index> M_list{70, 140};
  std::vector<double> snr_db{10.0, 20.0, 30.0, 40.0};
  int trials = 200;
  std::uint64_t seed = 1;
  std::vector<Algorithm> algorithms{Algorithm::kAmp, Algorithm::kCBamp, Algorithm::kCBossamp};
  double sigma_x2 = 1.0;
  RecoverySettings settings;

  void validate() const;
};

struct ExecutionOptions {
  int workers = 1;
  // Called once per finished cell; calls are serialised.
  std::function<void(const std::string&)> progress;
};

struct SweepRow {
  double mn = 0.0;  // M/N (grid sweeps)
  double km = 0.0;  // K/M (grid sweeps)
  Eigen::Index M = 0;
  Eigen::Index K = 0;
  bool noiseless = true;
  double snr_db = 0.0;
  std::string label;  // algorithm, or algorithm+detector
  int trials = 0;
  int successes = 0;
  double nmse_mean = 0.0;
  double nmse_median = 0.0;
  double mean_iterations = 0.0;
  int divergences = 0;
  std::uint64_t seed = 0;

  double success_rate() const { return trials > 0 ? static_cast<double>(successes) / trials : 0.0; }
};

struct SweepResult {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<SweepRow> rows;

  /// Rows with the given label, in grid order.
  std::vector<SweepRow> rows_for(const std::string& label) const;
  /// Mean success rate over all rows with the given label.
  double grid_average(const std::string& label) const;
};

struct ContourPoint {
  std::string label;
  double mn = 0.0;
  double km = 0.0;
};

/// Per-trial seed, a mix of (base, cell, trial).
std::uint64_t trial_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t trial);

/// Draws A, an exact-K signal and (unless noiseless) calibrated noise from `seed`.
/// The prior uses gamma0 = 1 - K/N.
ProblemInstance make_instance(Eigen::Index N, Eigen::Index M, Eigen::Index K, double sigma_x2,
                              bool noiseless, double snr_db, std::uint64_t seed);

/// Runs one algorithm. AMP uses lambda_heuristic(max(K, 1)).
RecoveryOutput run_algorithm(Algorithm algorithm, const ProblemInstance& instance, Eigen::Index K,
                             const RecoverySettings& settings);

/// Support detection on a finished recovery. Missing working gammas fall back to gamma0.
SupportEstimate detect_support(Detector detector, const RecoveryOutput& out,
                               const BernoulliGaussianPrior& prior, double gamma_clamp);

SweepResult run_phase_transition(const GridConfig& cfg, const ExecutionOptions& exec = {});

SweepResult run_support_phase_transition(const GridConfig& cfg,
                                         const std::vector<DetectionConfig>& detectors,
                                         const ExecutionOptions& exec = {});

SweepResult run_nmse_sweep(const NmseSweepConfig& cfg, const ExecutionOptions& exec = {});

/// For each (label, M/N) column, the K/M where the success rate first drops from
/// >= level to < level, linearly interpolated. Columns that never cross are omitted.
std::vector<ContourPoint> extract_contour(const SweepResult& result, double level = 0.5);

void write_sweep_csv(const SweepResult& result, std::ostream& out);
void write_contour_csv(const SweepResult& result, const std::vector<ContourPoint>& contour,
                       std::ostream& out);

/// Writes via a temporary file and renames it into place, so an interrupted
/// run never leaves a partial file under `path`.
void write_file_atomically(const std::string& path, const std::string& contents);

std::string version_string();

}  // namespace ampcs
