#include "ampcs/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ampcs/amp.hpp"
#include "ampcs/bamp.hpp"
#include "ampcs/bossamp.hpp"
#include "ampcs/experiments.hpp"
#include "ampcs/instance_io.hpp"
#include "ampcs/support.hpp"
#include "ampcs/validation.hpp"

namespace ampcs::cli {
namespace {

// Thrown for I/O failures so they map to exit code 3.
struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::map<std::string, LikelihoodVariant> kVariants{
    {"own-beta", LikelihoodVariant::kOwnBeta},
    {"printed-cross-beta", LikelihoodVariant::kPrintedCrossBeta}};
const std::map<std::string, PartVariance> kPartVariances{{"half", PartVariance::kHalf},
                                                         {"full", PartVariance::kFull}};

struct SolverOptions {
  int t_max = 100;
  double eps_tol = 1e-4;
  double beta_floor = 1e-12;
  double gamma_clamp = 1e-12;
  double divergence_factor = 1e4;
  std::string variant = "own-beta";
  std::string part_variance = "half";
  bool no_exchange = false;

  void attach(CLI::App& app) {
    app.add_option("--t-max", t_max, "Iteration cap")->check(CLI::PositiveNumber);
    app.add_option("--eps-tol", eps_tol, "Relative residual-change stopping threshold")
        ->check(CLI::PositiveNumber);
    app.add_option("--beta-floor", beta_floor, "Minimum effective noise variance")
        ->check(CLI::PositiveNumber);
    app.add_option("--gamma-clamp", gamma_clamp, "Zero-probability clamp margin");
    app.add_option("--divergence-factor", divergence_factor,
                   "Flag divergence when ||z||^2 exceeds this multiple of ||y||^2");
    app.add_option("--likelihood-variant", variant, "BOSSAMP likelihood beta pairing")
        ->check(CLI::IsMember({"own-beta", "printed-cross-beta"}));
    app.add_option("--part-variance", part_variance,
                   "Signal variance in the BOSSAMP likelihood: half (sigma_x2/2) or full")
        ->check(CLI::IsMember({"half", "full"}));
    app.add_flag("--no-exchange", no_exchange, "Disable the BOSSAMP likelihood exchange");
  }

  RecoverySettings settings() const {
    RecoverySettings s;
    s.t_max = t_max;
    s.eps_tol = eps_tol;
    s.beta_floor = beta_floor;
    s.gamma_clamp = gamma_clamp;
    s.divergence_factor = divergence_factor;
    s.likelihood_variant = kVariants.at(variant);
    s.likelihood_part_variance = kPartVariances.at(part_variance);
    s.exchange = !no_exchange;
    s.validate();
    return s;
  }
};

void emit(const std::string& contents, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << contents;
    return;
  }
  try {
    write_file_atomically(path, contents);
  } catch (const std::exception& e) {
    throw IoFailure(e.what());
  }
}

std::vector<Algorithm> parse_algorithms(const std::vector<std::string>& names) {
  std::vector<Algorithm> out;
  for (const auto& n : names) out.push_back(parse_algorithm(n));
  return out;
}

// ---------------------------------------------------------------- recover

struct RecoverCommand {
  std::string instance_path;
  std::string save_instance;
  Eigen::Index N = 256;
  Eigen::Index M = 128;
  std::optional<Eigen::Index> K;
  std::optional<double> snr_db;
  double sigma_x2 = 1.0;
  std::uint64_t seed = 1;
  std::string algo;
  std::string detect = "none";
  std::optional<double> lambda;
  std::string out_path;
  SolverOptions solver;

  CLI::App* attach(CLI::App& parent) {
    auto* app = parent.add_subcommand("recover", "Recover one instance (from file or generated)");
    app->add_option("--instance", instance_path, "Instance file to recover")->check(CLI::ExistingFile);
    app->add_option("--N", N, "Signal length when generating")->check(CLI::PositiveNumber);
    app->add_option("--M", M, "Measurements when generating")->check(CLI::PositiveNumber);
    app->add_option("--K", K, "Sparsity (generation, and AMP's threshold heuristic)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--snr-db", snr_db, "SNR in dB when generating (default: noiseless)");
    app->add_option("--sigma-x2", sigma_x2, "Complex signal variance")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "Generation seed");
    app->add_option("--algo", algo, "Algorithm")
        ->required()
        ->check(CLI::IsMember({"amp", "cbamp", "cbossamp"}));
    app->add_option("--detect", detect, "Support detector")->check(CLI::IsMember({"none", "prior", "em"}));
    app->add_option("--lambda", lambda, "AMP threshold multiplier (overrides the K heuristic)")
        ->check(CLI::PositiveNumber);
    app->add_option("--save-instance", save_instance, "Write the generated instance to this file");
    app->add_option("--out", out_path, "Result CSV path (default: stdout)");
    solver.attach(*app);
    return app;
  }

  int run(std::ostream& out) {
    ProblemInstance instance;
    Eigen::Index K_used = 0;
    if (!instance_path.empty()) {
      try {
        instance = load_instance(instance_path);
      } catch (const InstanceFormatError& e) {
        throw UsageError(fmt::format("{}: {}", instance_path, e.what()));
      } catch (const std::exception& e) {
        throw IoFailure(e.what());
      }
      if (algo == "amp" && !K && !lambda) {
        throw UsageError("--algo amp needs --K or --lambda (the threshold heuristic depends on K)");
      }
      K_used = K.value_or(0);
    } else {
      if (!K) throw UsageError("generating an instance requires --K");
      if (M >= N) throw UsageError("generated instances need M < N");
      if (*K > N) throw UsageError("--K must not exceed --N");
      instance = make_instance(N, M, *K, sigma_x2, !snr_db.has_value(), snr_db.value_or(0.0), seed);
      K_used = *K;
      if (!save_instance.empty()) {
        std::ostringstream text;
        write_instance(instance, text);
        emit(text.str(), save_instance, out);
      }
    }

    const RecoverySettings settings = solver.settings();
    RecoveryOutput result;
    const Algorithm algorithm = parse_algorithm(algo);
    if (algorithm == Algorithm::kAmp) {
      AmpConfig cfg = lambda ? AmpConfig{*lambda, settings}
                             : AmpConfig::for_sparsity(std::max<Eigen::Index>(K_used, 1), settings);
      result = camp_recover(instance.A, instance.y, cfg);
    } else {
      result = run_algorithm(algorithm, instance, K_used, settings);
    }

    const Detector detector = parse_detector(detect);
    const SupportEstimate support = detect_support(detector, result, instance.prior, settings.gamma_clamp);
    const ComplexVector estimate = detector == Detector::kNone ? result.x_hat : apply_support(result.x_hat, support);
    const SupportMetrics metrics = support_metrics(instance.x_true, support);
    const double error = instance.x_true.squared_norm() > 0.0 ? nmse(estimate, instance.x_true)
                                                              : estimate.squared_norm();

    std::ostringstream csv;
    csv << "# " << version_string() << " kind=recover"
        << fmt::format(" instance={} N={} M={} seed={} t_max={} eps_tol={} variant={} part_variance={} exchange={}",
                       instance_path.empty() ? "generated" : instance_path, instance.A.cols(),
                       instance.A.rows(), instance.seed, settings.t_max, settings.eps_tol,
                       solver.variant, solver.part_variance, settings.exchange ? "on" : "off")
        << '\n';
    csv << "algorithm,detector,N,M,K,seed,nmse,iterations,status,converged,exact_support,"
           "false_positives,false_negatives\n";
    csv << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", algo, detect, instance.A.cols(),
                       instance.A.rows(), K_used, instance.seed, error, result.iterations,
                       to_string(result.status), result.converged() ? "true" : "false",
                       metrics.exact_match ? "true" : "false", metrics.false_positives,
                       metrics.false_negatives);
    emit(csv.str(), out_path, out);
    return kOk;
  }
};

// ---------------------------------------------------------------- grid sweeps

struct GridCommand {
  bool support = false;
  Eigen::Index N = 256;
  int trials = 50;
  std::uint64_t seed = 1;
  std::vector<std::string> algos{"amp", "cbamp", "cbossamp"};
  std::vector<std::string> detectors{"cbamp+em", "cbossamp+em", "cbossamp+prior"};
  std::vector<double> mn_axis = default_axis();
  std::vector<double> km_axis = default_axis();
  double threshold = 1e-4;
  std::optional<double> snr_db;
  double sigma_x2 = 1.0;
  double contour_level = 0.5;
  std::string out_path;
  std::string contour_path;
  bool paper_scale = false;
  bool desk_scale = false;
  SolverOptions solver;
  CLI::Option* n_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
  CLI::Option* t_max_opt = nullptr;
  CLI::Option* eps_opt = nullptr;

  CLI::App* attach(CLI::App& parent, bool support_sweep) {
    support = support_sweep;
    auto* app = support ? parent.add_subcommand("support-pt", "Support-detection phase transition")
                        : parent.add_subcommand("phase-transition", "Recovery phase transition");
    n_opt = app->add_option("--N", N, "Signal length")->check(CLI::PositiveNumber);
    trials_opt = app->add_option("--trials", trials, "Trials per grid cell")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "Base seed");
    if (support) {
      app->add_option("--detectors", detectors, "algorithm+detector pairs, e.g. cbossamp+prior")
          ->delimiter(',');
    } else {
      app->add_option("--algos", algos, "Algorithms")->delimiter(',')->check(
          CLI::IsMember({"amp", "cbamp", "cbossamp"}));
    }
    app->add_option("--mn-axis", mn_axis, "M/N grid values")->delimiter(',');
    app->add_option("--km-axis", km_axis, "K/M grid values")->delimiter(',');
    app->add_option("--threshold", threshold, "NMSE success threshold")->check(CLI::PositiveNumber);
    app->add_option("--snr-db", snr_db, "Measure with noise at this SNR (default: noiseless)");
    app->add_option("--sigma-x2", sigma_x2, "Complex signal variance")->check(CLI::PositiveNumber);
    app->add_option("--level", contour_level, "Success rate of the extracted contour");
    app->add_option("--out", out_path, "Rate CSV path (default: stdout)");
    app->add_option("--contour-out", contour_path, "Contour CSV path (default: <out>.contour.csv)");
    auto* paper = app->add_flag("--paper-scale", paper_scale, "N=1000, 200 trials per cell");
    auto* desk = app->add_flag("--desk-scale", desk_scale, "N=256, 50 trials per cell (default)");
    paper->excludes(desk);
    solver.attach(*app);
    t_max_opt = app->get_option("--t-max");
    eps_opt = app->get_option("--eps-tol");
    return app;
  }

  int run(int workers, bool quiet, std::ostream& out, std::ostream& err) {
    if (paper_scale) {
      if (n_opt->count() == 0) N = 1000;
      if (trials_opt->count() == 0) trials = 200;
      if (t_max_opt->count() == 0) solver.t_max = 100;
      if (eps_opt->count() == 0) solver.eps_tol = 1e-4;
    }
    GridConfig cfg;
    cfg.N = N;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.mn_axis = mn_axis;
    cfg.km_axis = km_axis;
    cfg.success_threshold = threshold;
    cfg.noiseless = !snr_db.has_value();
    cfg.snr_db = snr_db.value_or(0.0);
    cfg.sigma_x2 = sigma_x2;
    cfg.settings = solver.settings();

    ExecutionOptions exec;
    exec.workers = workers;
    if (!quiet) exec.progress = [&err](const std::string& line) { err << line << '\n'; };

    SweepResult result;
    if (support) {
      std::vector<DetectionConfig> configs;
      for (const auto& d : detectors) {
        const auto plus = d.find('+');
        if (plus == std::string::npos) throw UsageError("detector entries look like cbossamp+prior, got '" + d + "'");
        configs.push_back({parse_algorithm(d.substr(0, plus)), parse_detector(d.substr(plus + 1))});
      }
      result = run_support_phase_transition(cfg, configs, exec);
    } else {
      cfg.algorithms = parse_algorithms(algos);
      result = run_phase_transition(cfg, exec);
    }

    std::ostringstream rates;
    write_sweep_csv(result, rates);
    std::ostringstream contour;
    write_contour_csv(result, extract_contour(result, contour_level), contour);
    emit(rates.str(), out_path, out);
    const std::string contour_target =
        !contour_path.empty() ? contour_path : (out_path.empty() || out_path == "-" ? "" : out_path + ".contour.csv");
    if (!contour_target.empty()) emit(contour.str(), contour_target, out);
    return kOk;
  }
};

struct NmseCommand {
  Eigen::Index N = 500;
  Eigen::Index K = 20;
  std::vector<Eigen::Index> M_list{70, 140};
  std::vector<double> snr_db{10.0, 20.0, 30.0, 40.0};
  int trials = 200;
  std::uint64_t seed = 1;
  std::vector<std::string> algos{"amp", "cbamp", "cbossamp"};
  double sigma_x2 = 1.0;
  std::string out_path;
  bool paper_scale = false;
  bool desk_scale = false;
  SolverOptions solver;
  CLI::Option* n_opt = nullptr;
  CLI::Option* trials_opt = nullptr;

  CLI::App* attach(CLI::App& parent) {
    auto* app = parent.add_subcommand("nmse-sweep", "NMSE versus SNR sweep (SNR given in dB)");
    n_opt = app->add_option("--N", N, "Signal length")->check(CLI::PositiveNumber);
    app->add_option("--K", K, "Sparsity")->check(CLI::PositiveNumber);
    app->add_option("--M", M_list, "Measurement counts")->delimiter(',');
    app->add_option("--snr-db", snr_db, "SNR points in dB (converted to linear internally)")->delimiter(',');
    trials_opt = app->add_option("--trials", trials, "Trials per point")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "Base seed");
    app->add_option("--algos", algos, "Algorithms")->delimiter(',')->check(
        CLI::IsMember({"amp", "cbamp", "cbossamp"}));
    app->add_option("--sigma-x2", sigma_x2, "Complex signal variance")->check(CLI::PositiveNumber);
    app->add_option("--out", out_path, "CSV path (default: stdout)");
    auto* paper = app->add_flag("--paper-scale", paper_scale, "N=1000, 1000 trials per point");
    auto* desk = app->add_flag("--desk-scale", desk_scale, "N=500, 200 trials per point (default)");
    paper->excludes(desk);
    solver.attach(*app);
    return app;
  }

  int run(int workers, bool quiet, std::ostream& out, std::ostream& err) {
    if (paper_scale) {
      if (n_opt->count() == 0) N = 1000;
      if (trials_opt->count() == 0) trials = 1000;
    }
    NmseSweepConfig cfg;
    cfg.N = N;
    cfg.K = K;
    cfg.M_list = M_list;
    cfg.snr_db = snr_db;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.algorithms = parse_algorithms(algos);
    cfg.sigma_x2 = sigma_x2;
    cfg.settings = solver.settings();
    ExecutionOptions exec;
    exec.workers = workers;
    if (!quiet) exec.progress = [&err](const std::string& line) { err << line << '\n'; };
    const SweepResult result = run_nmse_sweep(cfg, exec);
    std::ostringstream csv;
    write_sweep_csv(result, csv);
    emit(csv.str(), out_path, out);
    return kOk;
  }
};

// ---------------------------------------------------------------- validate-denoiser

struct ValidateCommand {
  std::string out_path;
  double tolerance = 1e-8;
  int mmse_trials = 100;
  double inject_error = 0.0;
  bool skip_mmse = false;

  CLI::App* attach(CLI::App& parent) {
    auto* app = parent.add_subcommand("validate-denoiser",
                                      "Check the closed-form denoiser against quadrature and the "
                                      "algorithms against exact small-N MMSE");
    app->add_option("--out", out_path, "Grid CSV path (default: stdout)");
    app->add_option("--tolerance", tolerance, "Max allowed |closed form - quadrature|");
    app->add_option("--mmse-trials", mmse_trials, "Paired trials for the N=10 MMSE check")
        ->check(CLI::PositiveNumber);
    app->add_flag("--skip-mmse", skip_mmse, "Only run the denoiser grid");
    // Test hook: perturbs the closed form to prove the check can fail.
    app->add_option("--inject-error", inject_error)->group("");
    return app;
  }

  int run(std::ostream& out, std::ostream& err) {
    DenoiserGridConfig grid;
    grid.tolerance = tolerance;
    const double delta = inject_error;
    const auto report = validate_denoiser_grid(grid, [delta](double u, const DenoiserParams& p) {
      return denoise(u, p) + delta * u;
    });
    std::ostringstream csv;
    write_denoiser_csv(report, csv);
    emit(csv.str(), out_path, out);

    bool ok = report.passed;
    err << fmt::format("denoiser grid: {} points, max |closed - quadrature| = {:.3e} (tolerance {:.1e}) {}\n",
                       report.points.size(), report.max_abs_diff, tolerance, report.passed ? "ok" : "FAILED");
    if (!report.passed) {
      for (const auto& p : report.worst(5)) {
        err << fmt::format("  u={} beta={} gamma={} closed={} quadrature={} diff={:.3e}\n", p.u, p.beta,
                           p.gamma, p.closed_form, p.quadrature, p.abs_diff);
      }
    }

    if (!skip_mmse) {
      for (bool noiseless : {true, false}) {
        MmseCheckConfig mmse;
        mmse.trials = mmse_trials;
        mmse.noiseless = noiseless;
        const auto check = check_against_exact_mmse(mmse);
        for (const auto& row : check.rows) {
          err << fmt::format("exact-MMSE ({}) {:8s} vs {:8s} oracle: mse re/im {:.4e}/{:.4e} oracle {:.4e}/{:.4e} {}\n",
                             noiseless ? "noiseless" : "20 dB", row.algorithm, row.oracle, row.mse_re,
                             row.mse_im, row.oracle_mse_re, row.oracle_mse_im, row.passed ? "ok" : "FAILED");
        }
        ok = ok && check.passed;
      }
    }
    return ok ? kOk : kValidationFailure;
  }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Complex compressed-sensing recovery with AMP, cBAMP and cBOSSAMP", "ampcs"};
  app.set_version_flag("--version", version_string());
  app.set_config("--config", "", "Key-value config file; command-line flags take precedence");
  app.require_subcommand(1);
  int workers = 1;
  bool quiet = false;
  app.add_option("--workers", workers, "Parallel workers for sweeps")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "Suppress the per-cell progress log");

  RecoverCommand recover;
  GridCommand phase;
  GridCommand support;
  NmseCommand nmse_cmd;
  ValidateCommand validate;
  auto* recover_app = recover.attach(app);
  auto* phase_app = phase.attach(app, false);
  auto* support_app = support.attach(app, true);
  auto* nmse_app = nmse_cmd.attach(app);
  auto* validate_app = validate.attach(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*recover_app) return recover.run(out);
    if (*phase_app) return phase.run(workers, quiet, out, err);
    if (*support_app) return support.run(workers, quiet, out, err);
    if (*nmse_app) return nmse_cmd.run(workers, quiet, out, err);
    if (*validate_app) return validate.run(out, err);
  } catch (const IoFailure& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace ampcs::cli
