#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "ampcs/experiments.hpp"

namespace ampcs {
namespace {

std::string csv_of(const SweepResult& r) {
  std::ostringstream out;
  write_sweep_csv(r, out);
  return out.str();
}

GridConfig small_grid() {
  GridConfig cfg;
  cfg.N = 64;
  cfg.mn_axis = {0.3, 0.6};
  cfg.km_axis = {0.1, 0.4, 0.7};
  cfg.trials = 6;
  cfg.seed = 17;
  return cfg;
}

TEST(TrialSeed, DistinctAcrossCellsAndTrials) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t cell = 0; cell < 40; ++cell) {
    for (std::uint64_t t = 0; t < 40; ++t) seen.insert(trial_seed(1, cell, t));
  }
  EXPECT_EQ(seen.size(), 1600u);
  EXPECT_NE(trial_seed(1, 2, 3), trial_seed(2, 2, 3));
  EXPECT_NE(trial_seed(1, 2, 3), trial_seed(1, 3, 2));
  EXPECT_EQ(trial_seed(5, 6, 7), trial_seed(5, 6, 7));
}

TEST(MakeInstance, PriorAndConsistency) {
  const auto inst = make_instance(100, 40, 7, 1.0, false, 20.0, 3);
  EXPECT_TRUE(inst.is_consistent());
  EXPECT_DOUBLE_EQ(inst.prior.gamma0[0], 0.93);
  EXPECT_GT(inst.sigma_w2, 0.0);
  const auto noiseless = make_instance(100, 40, 7, 1.0, true, 20.0, 3);
  EXPECT_EQ(noiseless.sigma_w2, 0.0);
  EXPECT_EQ(noiseless.w.squared_norm(), 0.0);
  EXPECT_TRUE(make_instance(100, 40, 7, 1.0, false, 20.0, 3).y == inst.y);
}

TEST(MakeInstance, ZeroSparsityIsNoiseFree) {
  const auto inst = make_instance(30, 10, 0, 1.0, false, 20.0, 4);
  EXPECT_EQ(inst.x_true.squared_norm(), 0.0);
  EXPECT_EQ(inst.y.squared_norm(), 0.0);
}

TEST(GridConfig, Rounding) {
  GridConfig cfg;
  cfg.N = 256;
  EXPECT_EQ(cfg.measurements(0.3), 77);
  EXPECT_EQ(cfg.measurements(0.001), 1);
  EXPECT_EQ(cfg.sparsity(0.26, 77), 20);
  EXPECT_EQ(cfg.sparsity(0.01, 10), 0);
  cfg.mn_axis = {1.5};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Parsing, NamesRoundTrip) {
  for (auto a : {Algorithm::kAmp, Algorithm::kCBamp, Algorithm::kCBossamp}) EXPECT_EQ(parse_algorithm(to_string(a)), a);
  for (auto d : {Detector::kNone, Detector::kPrior, Detector::kEm}) EXPECT_EQ(parse_detector(to_string(d)), d);
  EXPECT_THROW(parse_algorithm("lasso"), std::invalid_argument);
  EXPECT_EQ((DetectionConfig{Algorithm::kCBossamp, Detector::kPrior}.label()), "cbossamp+prior");
  EXPECT_EQ(default_axis().size(), 19u);
  EXPECT_DOUBLE_EQ(default_axis().front(), 0.05);
  EXPECT_NEAR(default_axis().back(), 0.95, 1e-12);
}

TEST(PhaseTransition, RowCountAndInvariants) {
  const auto cfg = small_grid();
  const auto result = run_phase_transition(cfg);
  ASSERT_EQ(result.rows.size(), 2u * 3u * 3u);
  for (const auto& r : result.rows) {
    EXPECT_LE(r.successes, r.trials);
    EXPECT_EQ(r.trials, 6);
    EXPECT_EQ(r.seed, 17u);
  }
  EXPECT_EQ(result.rows_for("cbossamp").size(), 6u);
}

TEST(PhaseTransition, WorkerCountDoesNotChangeBytes) {
  const auto cfg = small_grid();
  const auto one = csv_of(run_phase_transition(cfg, {1, {}}));
  const auto four = csv_of(run_phase_transition(cfg, {4, {}}));
  EXPECT_EQ(one, four);
}

TEST(PhaseTransition, ExtremeCells) {
  GridConfig cfg;
  cfg.mn_axis = {0.95};
  cfg.km_axis = {0.05};
  const auto easy = run_phase_transition(cfg);
  for (const auto& r : easy.rows) EXPECT_GE(r.success_rate(), 0.95) << r.label;
  cfg.mn_axis = {0.05};
  cfg.km_axis = {0.95};
  const auto hard = run_phase_transition(cfg);
  for (const auto& r : hard.rows) EXPECT_LE(r.success_rate(), 0.05) << r.label;
}

TEST(SupportPhaseTransition, EasyCellNearOne) {
  GridConfig cfg;
  cfg.mn_axis = {0.9};
  cfg.km_axis = {0.1};
  cfg.trials = 20;
  const auto result = run_support_phase_transition(cfg, default_detection_configs());
  ASSERT_EQ(result.rows.size(), 3u);
  for (const auto& r : result.rows) EXPECT_GE(r.success_rate(), 0.9) << r.label;
}

TEST(NmseSweep, MonotoneForCbossampAtHighM) {
  NmseSweepConfig cfg;
  cfg.M_list = {140};
  cfg.trials = 20;
  cfg.algorithms = {Algorithm::kCBossamp};
  const auto result = run_nmse_sweep(cfg);
  ASSERT_EQ(result.rows.size(), 4u);
  int inversions = 0;
  for (std::size_t i = 0; i + 1 < result.rows.size(); ++i) {
    EXPECT_LT(result.rows[i].snr_db, result.rows[i + 1].snr_db);
    if (result.rows[i + 1].nmse_mean > result.rows[i].nmse_mean) ++inversions;
  }
  EXPECT_LE(inversions, 1);
}

SweepResult column(std::vector<double> km, std::vector<int> successes) {
  SweepResult r;
  for (std::size_t i = 0; i < km.size(); ++i) {
    SweepRow row;
    row.label = "x";
    row.mn = 0.5;
    row.km = km[i];
    row.trials = 10;
    row.successes = successes[i];
    r.rows.push_back(row);
  }
  return r;
}

TEST(Contour, LinearMidpoint) {
  const auto c = extract_contour(column({0.1, 0.2, 0.3}, {10, 10, 0}), 0.5);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR(c[0].km, 0.25, 1e-15);
  EXPECT_EQ(c[0].mn, 0.5);
}

TEST(Contour, AllSuccessColumnIsOmitted) {
  EXPECT_TRUE(extract_contour(column({0.1, 0.2, 0.3}, {10, 10, 10})).empty());
  EXPECT_THROW(extract_contour(SweepResult{}), std::invalid_argument);
}

TEST(Contour, OneCrossingPerMonotoneColumn) {
  const auto c = extract_contour(column({0.3, 0.1, 0.2, 0.4}, {6, 10, 8, 0}), 0.5);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR(c[0].km, 0.3 + 0.1 * (0.6 - 0.5) / 0.6, 1e-15);
}

TEST(Csv, HeaderEchoesConfigAndSeed) {
  const auto text = csv_of(run_phase_transition(small_grid()));
  EXPECT_EQ(text.rfind("# " + version_string() + " kind=phase-transition", 0), 0u);
  EXPECT_NE(text.find("seed=17"), std::string::npos);
  EXPECT_NE(text.find("\nmn,km,M,K,snr_db,label,trials,successes,success_rate,"), std::string::npos);
  EXPECT_NE(text.find(",noiseless,"), std::string::npos);
}

TEST(AtomicWrite, ReplacesTargetAndLeavesNoTemporary) {
  const auto dir = std::filesystem::temp_directory_path() / "ampcs_atomic_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "out.csv").string();
  write_file_atomically(path, "first\n");
  write_file_atomically(path, "second\n");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "second");
  EXPECT_FALSE(std::filesystem::exists(path + ".partial"));
  EXPECT_THROW(write_file_atomically((dir / "missing" / "x.csv").string(), "x"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace ampcs
