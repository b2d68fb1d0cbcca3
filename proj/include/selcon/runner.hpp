#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "selcon/metrics.hpp"
#include "selcon/sci.hpp"

// Experiment orchestration: wires streams, estimators, and rules into the
// threshold recursion for each application, handles restart-on-freeze, and
// produces per-step traces.

namespace selcon {

enum class Experiment { Testing, Classify, Regress, SelectPredict, PredictLb, Ar };
enum class StatisticMode { Adaptive, Fixed, Oracle };

// Which pairs feed the estimator. PerAlgorithm follows each algorithm as
// written: testing and selection-by-prediction add only unselected pairs,
// everything else adds all pairs.
enum class AugmentRule { PerAlgorithm, All, Unselected };

enum class RegressSelect { All, Region, AdaptiveMean };

struct RestartPolicy {
  bool enabled = false;
  int patience = 200;  // consecutive frozen steps before restarting
  // Threshold after a restart; NaN means reuse q1.
  double reset_q = std::numeric_limits<double>::quiet_NaN();
};

struct ExperimentConfig {
  Experiment experiment = Experiment::Testing;
  double alpha = 0.1;
  double q1 = 0.5;
  double schedule_c = 1.0;
  double schedule_beta = 0.75;
  std::int64_t horizon = 3000;
  int holdout = 100;
  StatisticMode mode = StatisticMode::Adaptive;
  bool baseline = false;  // also run the decaying-ACI naive-selection baseline
  std::uint64_t seed = 1;
  int reps = 1;
  int ier_stride = 50;  // 0 disables instantaneous-rate logging
  int ier_mc = 2000;    // Monte-Carlo draws per logged point
  int mc_n = 100000;    // draws for reference-threshold computations
  RestartPolicy restart;
  AugmentRule augment = AugmentRule::PerAlgorithm;
  double y0 = 1.0;  // outcome threshold for selection-by-prediction runs
  // Per-class error weights for classification (empty = plain coverage
  // error). Must be nonnegative and sum to one.
  std::vector<double> class_weights;
  std::vector<double> ar_coeffs = {0.5};
  double ridge = 1e-6;
  int refit_stride = 1;
  RegressSelect regress_select = RegressSelect::All;
  double region_lo = 0.0;  // RegionSelect keeps x1 in [region_lo, region_hi]
  double region_hi = 1.0;
  double convergence_band = 0.05;
  double score_bound = 1.0;  // B
  int threads = 0;           // 0 = hardware concurrency
  std::string out_dir;

  StepSchedule schedule() const { return {schedule_c, schedule_beta}; }
};

// Per-experiment defaults mirroring the synthetic-experiment parameter
// choices (testing: q1 = 0.5, c = 1; classification: q1 = 0.8, c = 0.5;
// selection-by-prediction levels sit above their criticality floor).
ExperimentConfig default_config(Experiment experiment);

void validate(const ExperimentConfig& config);

struct RunResult {
  std::vector<TraceRecord> trace;
  int restarts = 0;
  std::uint64_t seed = 0;
};

RunResult run_testing(const ExperimentConfig&, std::uint64_t rep_seed);
RunResult run_classify(const ExperimentConfig&, std::uint64_t rep_seed);
RunResult run_regress(const ExperimentConfig&, std::uint64_t rep_seed);
RunResult run_select_predict(const ExperimentConfig&, std::uint64_t rep_seed);
RunResult run_predict_lb(const ExperimentConfig&, std::uint64_t rep_seed);
RunResult run_ar(const ExperimentConfig&, std::uint64_t rep_seed);
RunResult run_experiment(const ExperimentConfig&, std::uint64_t rep_seed);

// Decaying-step ACI baselines, updating at every time step. The regression
// variant reduces the recursion to the no-selection case (it must match the
// gated recursion bitwise when the latter selects everything); the
// classification variant defines selection post hoc as emitting a size-one
// set, the naive baseline the gated method is compared against.
RunResult run_regress_aci(const ExperimentConfig&, std::uint64_t rep_seed);
RunResult run_classify_aci_naive(const ExperimentConfig&, std::uint64_t rep_seed);

// Reference threshold the recursion should approach for this configuration,
// computed from the true data-generating model (closed form where available,
// otherwise by solving the Monte-Carlo benchmark). NaN when not defined.
double reference_threshold(const ExperimentConfig& config);

// ---- adversarial stress harness ----

enum class AdversarialWiring {
  RegressAll,
  RegressRegion,
  Classify,
  Testing,
  TestingAdaptive,
  SelectPredict,
  PredictLb,
};

std::vector<AdversarialWiring> all_adversarial_wirings();
std::string wiring_name(AdversarialWiring wiring);

struct AdversarialConfig {
  std::vector<AdversarialWiring> wirings = all_adversarial_wirings();
  int seeds = 100;
  std::int64_t steps = 1000;
  double alpha = 0.1;
  double q1 = 0.5;
  StepSchedule schedule = {1.0, 0.75};
  double score_bound = 1.0;
  double y0 = 1.0;
  std::uint64_t master_seed = 1234;
  RestartPolicy restart;  // off unless explicitly enabled
};

struct AdversarialReport {
  std::int64_t runs = 0;
  std::int64_t steps_checked = 0;
  std::int64_t fcp_violations = 0;
  std::int64_t threshold_violations = 0;
  // Largest fcp - bound observed across all steps; negative while the bound
  // holds everywhere.
  double max_fcp_slack = -std::numeric_limits<double>::infinity();
  std::string first_violation;  // empty when clean
};

// One adversarial trajectory: every selected step with a non-full set is
// forced to err.
RunResult run_adversarial_one(const AdversarialConfig&, AdversarialWiring,
                              std::uint64_t seed);

AdversarialReport run_adversarial_suite(const AdversarialConfig&);

}  // namespace selcon
