// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "ampcs/bamp.hpp"
#include "ampcs/bossamp.hpp"
#include "ampcs/denoiser.hpp"
#include "ampcs/detail/chain.hpp"
#include "ampcs/experiments.hpp"
#include "ampcs/support.hpp"
#include "ampcs/validation.hpp"

namespace {

using namespace ampcs;
using Clock = std::chrono::steady_clock;

constexpr double kDenoiserTolerance = 1e-8;
constexpr double kDenoiserSeconds = 10.0;
constexpr double kDerivativeRelTolerance = 1e-5;
constexpr double kMmseSlack = 1e-9;
constexpr double kMmseSeconds = 120.0;
constexpr double kOrderingSlack = 0.02;
constexpr double kBossampGap = 0.15;
constexpr double kFloorDb = 3.0;
constexpr double kDetectorAgreement = 0.05;
constexpr double kDetectorMargin = 0.02;

// Criteria whose failure is recorded as a known deviation: they still print
// FAIL, but do not fail the process.
const std::set<int> kKnownDeviations{6, 7};

struct Outcome {
  bool pass = false;
  std::string detail;
};

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string csv_of(const SweepResult& r) {
  std::ostringstream out;
  write_sweep_csv(r, out);
  return out.str();
}

const std::vector<double>& u_grid() {
  static const std::vector<double> grid = DenoiserGridConfig{}.u_grid;
  return grid;
}

Outcome denoiser_oracle() {
  const auto start = Clock::now();
  DenoiserGridConfig cfg;
  cfg.tolerance = kDenoiserTolerance;
  const auto report = validate_denoiser_grid(cfg);
  const double elapsed = seconds_since(start);
  const bool complete = report.points.size() == 50 * 4 * 4;
  return {report.passed && complete && elapsed < kDenoiserSeconds,
          fmt::format("max |closed - quadrature| = {:.3e} over {} points (tol {:.0e}), {:.2f} s (limit {} s)",
                      report.max_abs_diff, report.points.size(), kDenoiserTolerance, elapsed, kDenoiserSeconds)};
}

Outcome derivative_check() {
  const DenoiserGridConfig grid;
  double worst = 0.0;
  for (double beta : grid.betas) {
    for (double gamma : grid.gammas) {
      DenoiserParams p{beta, gamma, grid.s2};
      for (double u : u_grid()) {
        // Richardson-extrapolated central difference on the scale of the noise.
        const double h = 1e-3 * std::sqrt(beta);
        auto central = [&](double step) { return (denoise(u + step, p) - denoise(u - step, p)) / (2.0 * step); };
        const double fd = (4.0 * central(0.5 * h) - central(h)) / 3.0;
        const double d = denoise_deriv(u, p);
        worst = std::max(worst, std::abs(fd - d) / std::abs(d));
      }
    }
  }
  return {worst <= kDerivativeRelTolerance,
          fmt::format("max relative |F' - finite difference| = {:.3e} (tol {:.0e})", worst, kDerivativeRelTolerance)};
}

Outcome generalization() {
  RecoverySettings off;
  off.exchange = false;
  int identical = 0;
  for (int i = 0; i < 20; ++i) {
    const Eigen::Index M = 20 + 2 * i;
    const Eigen::Index K = 2 + i / 2;
    const bool noiseless = i % 2 == 0;
    const auto inst = make_instance(64, M, K, 1.0, noiseless, 30.0, trial_seed(2024, 0, static_cast<std::uint64_t>(i)));
    const auto a = cbossamp_recover(inst.A, inst.y, inst.prior, off);
    const auto b = cbamp_recover(inst.A, inst.y, inst.prior, {});
    const bool same = a.x_hat == b.x_hat && a.real.iterations == b.real.iterations &&
                      a.imag.iterations == b.imag.iterations && a.status == b.status;
    identical += same ? 1 : 0;
  }
  return {identical == 20, fmt::format("{}/20 instances bitwise identical", identical)};
}

Outcome mmse_bound() {
  const auto start = Clock::now();
  bool pass = true;
  std::string detail;
  for (bool noiseless : {true, false}) {
    MmseCheckConfig cfg;
    cfg.trials = 500;
    cfg.noiseless = noiseless;
    cfg.snr_db = 20.0;
    cfg.slack = kMmseSlack;
    const auto report = check_against_exact_mmse(cfg);
    pass = pass && report.passed;
    for (const auto& row : report.rows) {
      detail += fmt::format("{}{}:{} gap {:.2e}/{:.2e}", detail.empty() ? "" : "; ",
                            noiseless ? "noiseless" : "20dB", row.algorithm, row.gap_re, row.gap_im);
    }
  }
  const double elapsed = seconds_since(start);
  return {pass && elapsed < kMmseSeconds, fmt::format("{} (slack {:.0e}), {:.1f} s", detail, kMmseSlack, elapsed)};
}

GridConfig desk_grid() {
  GridConfig cfg;
  cfg.N = 256;
  cfg.trials = 50;
  cfg.noiseless = true;
  return cfg;
}

Outcome ordering() {
  const auto start = Clock::now();
  const auto result = run_phase_transition(desk_grid(), {workers(), {}});
  const double amp = result.grid_average("amp");
  const double bamp = result.grid_average("cbamp");
  const double boss = result.grid_average("cbossamp");
  const bool complete = result.rows.size() == 19 * 19 * 3;
  return {complete && boss >= bamp - kOrderingSlack && bamp >= amp - kOrderingSlack,
          fmt::format("grid averages cbossamp {:.4f} >= cbamp {:.4f} >= amp {:.4f} (slack {}), {:.0f} s",
                      boss, bamp, amp, kOrderingSlack, seconds_since(start))};
}

Outcome discussion_gap() {
  GridConfig cfg;
  cfg.N = 256;
  cfg.mn_axis = {77.0 / 256.0};
  cfg.km_axis = {20.0 / 77.0};
  cfg.trials = 100;
  cfg.algorithms = {Algorithm::kCBamp, Algorithm::kCBossamp};
  const auto result = run_phase_transition(cfg, {workers(), {}});
  const auto& bamp = result.rows_for("cbamp").front();
  const auto& boss = result.rows_for("cbossamp").front();
  const double gap = boss.success_rate() - bamp.success_rate();
  return {bamp.M == 77 && bamp.K == 20 && gap >= kBossampGap,
          fmt::format("M={} K={}: cbossamp {:.2f} - cbamp {:.2f} = {:.2f} (need >= {})", bamp.M, bamp.K,
                      boss.success_rate(), bamp.success_rate(), gap, kBossampGap)};
}

Outcome nmse_claims() {
  NmseSweepConfig cfg;
  cfg.N = 500;
  cfg.K = 20;
  cfg.M_list = {70, 140};
  cfg.snr_db = {10.0, 20.0, 30.0, 40.0};
  cfg.trials = 200;
  const auto result = run_nmse_sweep(cfg, {workers(), {}});
  auto find = [&](const std::string& label, Eigen::Index M, double snr) {
    for (const auto& r : result.rows) {
      if (r.label == label && r.M == M && r.snr_db == snr) return r;
    }
    throw std::runtime_error("missing NMSE sweep row");
  };
  const double bamp_gain = linear_to_db(find("cbamp", 70, 30.0).nmse_mean) - linear_to_db(find("cbamp", 70, 40.0).nmse_mean);
  const double boss_gain =
      linear_to_db(find("cbossamp", 70, 30.0).nmse_mean) - linear_to_db(find("cbossamp", 70, 40.0).nmse_mean);
  const double boss_median = find("cbossamp", 70, 40.0).nmse_median;
  const double amp_median = find("amp", 140, 40.0).nmse_median;
  const bool a = bamp_gain < kFloorDb && boss_gain > kFloorDb;
  const bool b = boss_median < amp_median;
  return {a && b, fmt::format("(a) 30->40 dB mean gain cbamp@70 {:.2f} dB (< {}), cbossamp@70 {:.2f} dB (> {}) {}; "
                              "(b) median cbossamp@70 {:.2f} dB < amp@140 {:.2f} dB {}",
                              bamp_gain, kFloorDb, boss_gain, kFloorDb, a ? "ok" : "no",
                              linear_to_db(boss_median), linear_to_db(amp_median), b ? "ok" : "no")};
}

Outcome support_claims() {
  const auto start = Clock::now();
  const auto result = run_support_phase_transition(desk_grid(), default_detection_configs(), {workers(), {}});
  const double bamp_em = result.grid_average("cbamp+em");
  const double boss_em = result.grid_average("cbossamp+em");
  const double boss_prior = result.grid_average("cbossamp+prior");
  const bool agree = std::abs(boss_em - boss_prior) <= kDetectorAgreement;
  const bool margin = boss_em - bamp_em >= kDetectorMargin && boss_prior - bamp_em >= kDetectorMargin;
  return {agree && margin,
          fmt::format("cbossamp+em {:.4f}, cbossamp+prior {:.4f} (|diff| {:.4f} <= {}), cbamp+em {:.4f} "
                      "(margins {:.4f}/{:.4f} >= {}), {:.0f} s",
                      boss_em, boss_prior, std::abs(boss_em - boss_prior), kDetectorAgreement, bamp_em,
                      boss_em - bamp_em, boss_prior - bamp_em, kDetectorMargin, seconds_since(start))};
}

Outcome determinism() {
  GridConfig grid;
  grid.N = 128;
  grid.trials = 8;
  grid.seed = 99;
  grid.mn_axis = {0.1, 0.25, 0.4, 0.55, 0.7, 0.85};
  grid.km_axis = grid.mn_axis;
  NmseSweepConfig sweep;
  sweep.N = 200;
  sweep.K = 8;
  sweep.M_list = {40, 80};
  sweep.trials = 10;

  int checked = 0, identical = 0;
  auto compare = [&](const std::function<std::string(int)>& run) {
    const std::string reference = run(1);
    for (int w : {1, 3, 8}) {
      ++checked;
      identical += run(w) == reference ? 1 : 0;
    }
  };
  compare([&](int w) { return csv_of(run_phase_transition(grid, {w, {}})); });
  compare([&](int w) { return csv_of(run_support_phase_transition(grid, default_detection_configs(), {w, {}})); });
  compare([&](int w) { return csv_of(run_nmse_sweep(sweep, {w, {}})); });
  return {identical == checked, fmt::format("{}/{} reruns byte-identical (workers 1, 3, 8)", identical, checked)};
}

Outcome properties() {
  std::vector<std::string> failures;

  // Denoiser oddness, shrinkage and monotonicity.
  const DenoiserGridConfig grid;
  for (double beta : grid.betas) {
    for (double gamma : grid.gammas) {
      DenoiserParams p{beta, gamma, grid.s2};
      double previous = -INFINITY;
      for (int i = 0; i <= 1000; ++i) {
        const double u = -10.0 + 0.02 * i;
        const double f = denoise(u, p);
        if (f != -denoise(-u, p)) failures.push_back(fmt::format("odd u={} beta={} gamma={}", u, beta, gamma));
        if (std::abs(f) > std::abs(u)) failures.push_back(fmt::format("shrink u={} beta={} gamma={}", u, beta, gamma));
        if (f < previous) failures.push_back(fmt::format("monotone u={} beta={} gamma={}", u, beta, gamma));
        previous = f;
      }
    }
  }

  // Onsager coefficient equals the mean denoiser derivative.
  const auto inst = make_instance(128, 64, 8, 1.0, false, 30.0, 5);
  const PartPrior prior = PartPrior::from(inst.prior);
  RecoverySettings s;
  detail::Chain chain(inst.A.eigen(), inst.y.re, s);
  auto eta = [&](const Vector& u, double beta, Vector& x_hat) {
    return denoise_vector(u, beta, prior.gamma0, prior.s2, s.gamma_clamp, x_hat);
  };
  do {
    chain.step(eta);
    double sum = 0.0;
    for (Eigen::Index n = 0; n < chain.u().size(); ++n) {
      sum += denoise_deriv(chain.u()[n], DenoiserParams{chain.beta(), prior.gamma0[n], prior.s2});
    }
    if (std::abs(chain.onsager() - sum / 64.0) > 1e-13) failures.push_back("onsager coefficient");
  } while (chain.can_continue());

  // Detector tie-breaks and symmetry.
  const Vector hi = Vector::Constant(1, 0.9), lo = Vector::Constant(1, 0.1);
  if (detect_prior_based(hi, lo).is_active(0) || detect_prior_based(lo, hi).is_active(0)) {
    failures.push_back("prior rule tie must resolve to zero");
  }
  // Exact EM tie: beta + sigma_x2 / 2 rounds to beta, so sigma_00 == sigma_11.
  const Vector origin = Vector::Zero(1), half = Vector::Constant(1, 0.5);
  if (detect_em(EmInputs{origin, origin, 1.0, 1.0, half, half, 1e-300}).is_active(0)) {
    failures.push_back("EM tie must resolve to zero");
  }
  Rng rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector ga(500), gb(500), ua(500), ub(500);
  for (int n = 0; n < 500; ++n) {
    ga[n] = unit(rng);
    gb[n] = unit(rng);
    ua[n] = 6.0 * unit(rng) - 3.0;
    ub[n] = 6.0 * unit(rng) - 3.0;
  }
  if (!(detect_prior_based(ga, gb) == detect_prior_based(gb, ga))) failures.push_back("prior rule symmetry");
  if (!(detect_em(EmInputs{ua, ub, 0.4, 0.7, ga, gb, 1.0}) == detect_em(EmInputs{ub, ua, 0.7, 0.4, gb, ga, 1.0}))) {
    failures.push_back("EM rule symmetry");
  }

  // NMSE identities.
  const auto& x = inst.x_true;
  if (nmse(x, x) != 0.0) failures.push_back("nmse(x, x)");
  if (std::abs(nmse(ComplexVector::zeros(x.size()), x) - 1.0) > 1e-15) failures.push_back("nmse(0, x)");
  if (std::abs(nmse(ComplexVector(2.0 * x.re, 2.0 * x.im), x) - 1.0) > 1e-15) failures.push_back("nmse(2x, x)");

  std::string detail = failures.empty() ? "denoiser, Onsager, detector and NMSE properties hold"
                                        : fmt::format("{} violations, first: {}", failures.size(), failures.front());
  return {failures.empty(), detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const std::vector<Criterion> criteria{
      {1, "denoiser oracle equivalence", denoiser_oracle},
      {2, "denoiser derivative check", derivative_check},
      {3, "exchange-free BOSSAMP equals cBAMP", generalization},
      {4, "exact-MMSE one-sided bound", mmse_bound},
      {5, "phase-transition ordering", ordering},
      {6, "cBOSSAMP gap at M=77, K=20", discussion_gap},
      {7, "NMSE versus SNR claims", nmse_claims},
      {8, "support-detection claims", support_claims},
      {9, "determinism across worker counts", determinism},
      {10, "property suites", properties},
  };

  std::cout << fmt::format("ampcs acceptance ({}, {} workers)\n", version_string(), workers()) << std::flush;
  int failed = 0, unexpected = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << fmt::format("{} {:>2} {}: {}", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail);
    if (!o.pass && kKnownDeviations.count(c.id)) std::cout << " [known deviation]";
    std::cout << '\n' << std::flush;
    if (!o.pass) {
      ++failed;
      if (!kKnownDeviations.count(c.id)) ++unexpected;
    }
  }
  std::cout << fmt::format("{}/{} criteria passed; {} unexpected failure(s)\n", criteria.size() - failed,
                           criteria.size(), unexpected);
  return unexpected == 0 ? 0 : 1;
}
