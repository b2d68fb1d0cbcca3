// Command-line harness around the experiment runner. One positional
// experiment name (testing, classify, regress, select_predict, predict_lb,
// ar, adversarial), flags override config-file values, and the effective
// configuration is echoed next to the output traces.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "selcon/io.hpp"
#include "selcon/runner.hpp"

namespace {

int run_adversarial_cli(std::vector<std::string> args) {
  CLI::App app{"adversarial stress suite"};
  selcon::AdversarialConfig cfg;
  int patience = cfg.restart.patience;
  bool restart = false;
  app.add_option("--seeds", cfg.seeds, "independent runs per wiring");
  app.add_option("--steps", cfg.steps, "steps per run");
  app.add_option("--alpha", cfg.alpha, "target level");
  app.add_option("--q1", cfg.q1, "initial threshold");
  app.add_option("--c", cfg.schedule.scale, "step scale");
  app.add_option("--beta", cfg.schedule.decay, "step decay exponent");
  app.add_option("--y0", cfg.y0, "outcome threshold for the prediction wirings");
  app.add_option("--seed", cfg.master_seed, "master seed");
  app.add_option("--restart", restart, "enable restart-on-freeze");
  app.add_option("--restart-patience", patience, "frozen steps before restart");
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  cfg.restart.enabled = restart;
  cfg.restart.patience = patience;

  const auto report = selcon::run_adversarial_suite(cfg);
  std::printf("runs=%lld steps=%lld fcp_violations=%lld threshold_violations=%lld max_fcp_slack=%.6g\n",
              static_cast<long long>(report.runs),
              static_cast<long long>(report.steps_checked),
              static_cast<long long>(report.fcp_violations),
              static_cast<long long>(report.threshold_violations),
              report.max_fcp_slack);
  if (!report.first_violation.empty()) {
    std::printf("first violation: %s\n", report.first_violation.c_str());
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: selcon <testing|classify|regress|select_predict|"
                 "predict_lb|ar|adversarial> [options]\n"
                 "       selcon <experiment> --help\n";
    return 2;
  }
  const std::string experiment_arg = argv[1];
  std::vector<std::string> args(argv + 2, argv + argc);

  try {
    if (experiment_arg == "adversarial") return run_adversarial_cli(std::move(args));

    selcon::ExperimentConfig cfg =
        selcon::default_config(selcon::experiment_from_name(experiment_arg));

    // Config file first, flags override.
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] == "--config") selcon::apply_config_file(cfg, args[i + 1]);
    }

    CLI::App app{"online selective conformal inference harness"};
    std::string config_path, mode, augment, select, phi, weights;
    std::string out_dir = cfg.out_dir;
    bool restart = cfg.restart.enabled;
    app.add_option("--config", config_path, "flat key=value config file");
    app.add_option("--alpha", cfg.alpha, "target level in (0,1)");
    app.add_option("--q1", cfg.q1, "initial threshold in [0,B)");
    app.add_option("--c", cfg.schedule_c, "step scale");
    app.add_option("--beta", cfg.schedule_beta, "step decay exponent in (0,1)");
    app.add_option("--horizon", cfg.horizon, "number of time steps");
    app.add_option("--holdout", cfg.holdout, "initial labeled sample size");
    app.add_option("--mode", mode, "statistic mode: adaptive|fixed|oracle");
    app.add_flag("--baseline", cfg.baseline,
                 "also run the decaying-ACI naive-selection baseline (classify)");
    app.add_option("--seed", cfg.seed, "master seed");
    app.add_option("--reps", cfg.reps, "replication count");
    app.add_option("--ier-stride", cfg.ier_stride,
                   "steps between instantaneous-rate logs (0 = off)");
    app.add_option("--ier-mc", cfg.ier_mc, "Monte-Carlo draws per logged point");
    app.add_option("--mc-n", cfg.mc_n, "draws for reference-threshold solves");
    app.add_option("--restart", restart, "enable restart-on-freeze");
    app.add_option("--restart-patience", cfg.restart.patience,
                   "frozen steps before restart");
    app.add_option("--restart-q1", cfg.restart.reset_q, "threshold after restart");
    app.add_option("--augment", augment,
                   "estimator data: per_algorithm|all|unselected");
    app.add_option("--y0", cfg.y0, "outcome threshold");
    app.add_option("--weights", weights,
                   "per-class error weights, comma separated (classify)");
    app.add_option("--phi", phi, "AR coefficients, comma separated");
    app.add_option("--ridge", cfg.ridge, "ridge penalty for the AR fit");
    app.add_option("--refit-stride", cfg.refit_stride, "steps between AR refits");
    app.add_option("--select", select, "regress selection: all|region|adaptive_mean");
    app.add_option("--region-lo", cfg.region_lo, "selection region lower edge (x1)");
    app.add_option("--region-hi", cfg.region_hi, "selection region upper edge (x1)");
    app.add_option("--band", cfg.convergence_band, "convergence band around q0");
    app.add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
    app.add_option("--out", out_dir, "output directory")->required(out_dir.empty());

    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      return app.exit(e);
    }
    cfg.restart.enabled = restart;
    cfg.out_dir = out_dir;
    if (!mode.empty()) selcon::apply_config_entry(cfg, "mode", mode);
    if (!augment.empty()) selcon::apply_config_entry(cfg, "augment", augment);
    if (!select.empty()) selcon::apply_config_entry(cfg, "select", select);
    if (!weights.empty()) selcon::apply_config_entry(cfg, "weights", weights);
    if (!phi.empty()) selcon::apply_config_entry(cfg, "phi", phi);

    selcon::run_replications(cfg);
    std::cout << "wrote " << cfg.reps << " trace(s) to " << cfg.out_dir << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
