// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Every trace produced anywhere in the suite also feeds the
// threshold-envelope check of criterion 2.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "selcon/datagen.hpp"
#include "selcon/estimators.hpp"
#include "selcon/metrics.hpp"
#include "selcon/normal.hpp"
#include "selcon/oracle.hpp"
#include "selcon/rng.hpp"
#include "selcon/rules.hpp"
#include "selcon/runner.hpp"

using namespace selcon;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

// criterion 2 accumulators
std::int64_t g_envelope_steps = 0;
std::int64_t g_envelope_violations = 0;

void track_envelope(const std::vector<TraceRecord>& trace,
                    const StepSchedule& schedule, double score_bound,
                    double alpha) {
  g_envelope_steps += static_cast<std::int64_t>(trace.size());
  g_envelope_violations +=
      count_threshold_violations(trace, schedule, score_bound, alpha);
}

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* format, ...) {
  va_list args;
  va_start(args, format);
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

PolicySnapshot testing_oracle_policy(const MixtureModel& mixture) {
  PolicySnapshot policy;
  policy.selects = [mixture](std::span<const double> x, double q) {
    return q < 1.0 && true_lfdr(mixture, x) <= 1.0 - q;
  };
  policy.predict = [](std::span<const double>, double) {
    return PredictionSet::label(1);
  };
  policy.error = [](const Observation& ob, const PredictionSet&) {
    return testing_error(static_cast<int>(ob.y));
  };
  return policy;
}

// Frozen from a development-time run of the Monte-Carlo oracle below
// (200000 draws); the runtime recomputation must land nearby.
constexpr double kTestingQ0Fixture = 0.09183;
constexpr double kTestingPowerFixture = 0.19648;

void criterion_1_adversarial() {
  const auto t0 = Clock::now();
  AdversarialConfig acfg;  // 7 wirings x 100 seeds x 1000 steps, restarts off
  const AdversarialReport rep = run_adversarial_suite(acfg);
  const double elapsed = seconds_since(t0);
  const bool pass = rep.fcp_violations == 0 && rep.threshold_violations == 0 &&
                    elapsed < 10.0;
  g_envelope_steps += rep.steps_checked;
  g_envelope_violations += rep.threshold_violations;
  report(1, pass,
         fmt("adversarial: %lld runs, %lld steps, fcp violations=%lld, "
             "envelope violations=%lld, max fcp slack=%.3g, %.2fs%s",
             static_cast<long long>(rep.runs),
             static_cast<long long>(rep.steps_checked),
             static_cast<long long>(rep.fcp_violations),
             static_cast<long long>(rep.threshold_violations), rep.max_fcp_slack,
             elapsed, rep.first_violation.empty()
                          ? ""
                          : (" first=" + rep.first_violation).c_str()));
}

void criterion_3_regress_oracle() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg = default_config(Experiment::Regress);
  cfg.mode = StatisticMode::Oracle;
  cfg.horizon = 20000;
  cfg.ier_stride = 0;
  int hits = 0;
  double worst = 0.0;
  for (int s = 0; s < 50; ++s) {
    const RunResult r = run_regress(cfg, split_seed(101, s));
    track_envelope(r.trace, cfg.schedule(), cfg.score_bound, cfg.alpha);
    const double dev = std::fabs(r.trace.back().q - 0.9);
    worst = std::max(worst, dev);
    if (dev <= 0.05) ++hits;
  }
  const double elapsed = seconds_since(t0);
  const bool pass = hits >= 45 && elapsed < 30.0;
  report(3, pass,
         fmt("regression oracle: |qT - 0.9| <= 0.05 in %d/50 seeds "
             "(worst %.4f), %.2fs",
             hits, worst, elapsed));
}

void criterion_4_testing() {
  const auto t0 = Clock::now();

  // oracle-policy runs
  ExperimentConfig cfg = default_config(Experiment::Testing);
  cfg.mode = StatisticMode::Oracle;
  cfg.horizon = 3000;
  cfg.ier_stride = 0;
  double fdp_sum = 0.0;
  for (int s = 0; s < 50; ++s) {
    const RunResult r = run_testing(cfg, split_seed(202, s));
    track_envelope(r.trace, cfg.schedule(), cfg.score_bound, cfg.alpha);
    fdp_sum += r.trace.back().fcp;
  }
  const double mean_fdp = fdp_sum / 50.0;

  // oracle power reference at the benchmark crossing
  ExperimentConfig ref_cfg = cfg;
  ref_cfg.mc_n = 200000;
  const double q0 = reference_threshold(ref_cfg);
  const MixtureModel mixture = MixtureModel::testing();
  const StreamSpec spec = StreamSpec::testing_mixture(mixture);
  Rng rng(777);
  const double power_ref =
      estimate_power(spec, testing_oracle_policy(mixture), q0, 200000, rng);
  const bool fixture_ok = std::fabs(q0 - kTestingQ0Fixture) <= 0.01 &&
                          std::fabs(power_ref - kTestingPowerFixture) <= 0.01;

  // adaptive runs, instantaneous power logged exactly at T
  ExperimentConfig ada = default_config(Experiment::Testing);
  ada.mode = StatisticMode::Adaptive;
  ada.horizon = 3000;
  ada.ier_stride = 3000;
  ada.ier_mc = 100000;
  double power_sum = 0.0;
  for (int s = 0; s < 50; ++s) {
    const RunResult r = run_testing(ada, split_seed(202, s));
    track_envelope(r.trace, ada.schedule(), ada.score_bound, ada.alpha);
    power_sum += r.trace.back().power;
  }
  const double mean_power = power_sum / 50.0;

  const double elapsed = seconds_since(t0);
  const bool pass = mean_fdp >= 0.05 && mean_fdp <= 0.12 &&
                    std::fabs(mean_power - power_ref) <= 0.05 && fixture_ok &&
                    elapsed < 120.0;
  report(4, pass,
         fmt("testing: oracle mean FDP=%.4f in [0.05,0.12]; adaptive power=%.4f "
             "vs oracle reference %.4f at q0=%.4f (|diff|=%.4f <= 0.05), %.2fs",
             mean_fdp, mean_power, power_ref, q0,
             std::fabs(mean_power - power_ref), elapsed));
}

void criterion_5_naive_selection() {
  const auto t0 = Clock::now();
  // Fixed-statistic variant (initial sample of 10): the selection failure of
  // the ungated recursion shows decisively there, while the gated recursion
  // on the same streams keeps its distribution-free bound.
  ExperimentConfig cfg = default_config(Experiment::Classify);
  cfg.mode = StatisticMode::Fixed;
  cfg.horizon = 2000;
  cfg.ier_stride = 0;
  double naive_sum = 0.0;
  int sci_within = 0;
  for (int s = 0; s < 50; ++s) {
    const std::uint64_t seed = split_seed(303, s);
    const RunResult naive = run_classify_aci_naive(cfg, seed);
    const RunResult sci = run_classify(cfg, seed);
    track_envelope(sci.trace, cfg.schedule(), cfg.score_bound, cfg.alpha);
    naive_sum += naive.trace.back().fcp;
    const double bound =
        fcp_bound(sci.trace.back().j, cfg.schedule(), cfg.score_bound, cfg.alpha);
    if (sci.trace.back().fcp <= bound + 1e-12) ++sci_within;
  }
  const double naive_mean = naive_sum / 50.0;
  const double elapsed = seconds_since(t0);
  const bool pass = naive_mean > 0.15 && sci_within == 50 && elapsed < 60.0;
  report(5, pass,
         fmt("naive selection: ungated mean FCP=%.4f > 0.15; gated recursion "
             "within its bound in %d/50 seeds, %.2fs",
             naive_mean, sci_within, elapsed));
}

void criterion_6_solver() {
  bool pass = true;
  std::string detail = "q0 solver:";
  for (double alpha : {0.05, 0.1, 0.2, 0.5}) {
    const double q0 = solve_q0_regression(alpha, 1e-6);
    const double err = std::fabs(q0 - (1.0 - alpha));
    if (err > 1e-6) pass = false;
    detail += fmt(" a=%.2f err=%.2g;", alpha, err);
  }
  Rng rng(505);
  std::vector<double> uniform(100000);
  for (double& w : uniform) w = rng.uniform01();
  const InformativeBenchmark bench(std::move(uniform), 1.0);
  const double q0u = solve_q0_informative(0.1, bench);
  // three standard errors through the local slope 1/2 of the uniform map
  const double se = bench.pi0_stderr(0.8) / 0.5;
  const double uerr = std::fabs(q0u - 0.8);
  if (uerr > 3.0 * se + 1e-6) pass = false;
  detail += fmt(" uniform q0=%.5f (err %.2g, 3se %.2g)", q0u, uerr, 3.0 * se);
  report(6, pass, detail);
}

void criterion_7_reduction() {
  ExperimentConfig cfg = default_config(Experiment::Regress);
  cfg.mode = StatisticMode::Oracle;
  cfg.horizon = 10000;
  cfg.ier_stride = 0;
  const RunResult gated = run_regress(cfg, 424242);
  const RunResult plain = run_regress_aci(cfg, 424242);
  track_envelope(gated.trace, cfg.schedule(), cfg.score_bound, cfg.alpha);
  std::int64_t mismatches = 0;
  for (std::size_t i = 0; i < gated.trace.size(); ++i) {
    if (gated.trace[i].q != plain.trace[i].q) ++mismatches;
  }
  const bool pass = mismatches == 0 && gated.trace.size() == 10000;
  report(7, pass,
         fmt("reduction: select-all trajectory vs every-step recursion, "
             "%lld bitwise mismatches over %zu steps",
             static_cast<long long>(mismatches), gated.trace.size()));
}

void criterion_8_restart() {
  AdversarialConfig acfg;
  acfg.restart.enabled = true;
  acfg.restart.patience = 200;
  acfg.steps = 350;  // long enough to restart once, short of a second cycle
  const RunResult r = run_adversarial_one(acfg, AdversarialWiring::Testing, 888);
  track_envelope(r.trace, acfg.schedule, acfg.score_bound, acfg.alpha);

  std::int64_t freeze_t = -1;
  std::int64_t first_restart_t = -1;
  int in_window = 0;
  for (const auto& rec : r.trace) {
    if (freeze_t < 0 && rec.q >= acfg.score_bound) freeze_t = rec.t;
    if (rec.restarted) {
      if (first_restart_t < 0) first_restart_t = rec.t;
      if (freeze_t > 0 && rec.t <= freeze_t + acfg.restart.patience) ++in_window;
    }
  }
  const std::int64_t segment_violations = count_fcp_bound_violations(
      r.trace, acfg.schedule, acfg.score_bound, acfg.alpha);
  const bool pass = freeze_t > 0 && r.restarts == 1 && in_window == 1 &&
                    first_restart_t - freeze_t <= acfg.restart.patience &&
                    segment_violations == 0;
  report(8, pass,
         fmt("restart: froze at t=%lld, restarted at t=%lld (window %d), "
             "restarts=%d, segment-wise fcp violations=%lld",
             static_cast<long long>(freeze_t),
             static_cast<long long>(first_restart_t), in_window, r.restarts,
             static_cast<long long>(segment_violations)));
}

void criterion_9_ar() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg = default_config(Experiment::Ar);
  cfg.horizon = 20000;
  cfg.ier_stride = 0;
  int hits = 0;
  double worst = 0.0;
  for (int s = 0; s < 50; ++s) {
    const RunResult r = run_ar(cfg, split_seed(909, s));
    track_envelope(r.trace, cfg.schedule(), cfg.score_bound, cfg.alpha);
    const double dev = std::fabs(r.trace.back().q - 0.9);
    worst = std::max(worst, dev);
    if (dev <= 0.07) ++hits;
  }

  StreamSampler sampler(StreamSpec::ar_process({{0.5}, 1000}), 91919);
  std::vector<double> history;
  history.reserve(100000);
  for (int i = 0; i < 100000; ++i) history.push_back(sampler.next().y);
  const double phi_hat = ar_fit(history, 1, 1e-6)[0];

  const double elapsed = seconds_since(t0);
  const bool pass =
      hits >= 40 && std::fabs(phi_hat - 0.5) <= 0.02 && elapsed < 60.0;
  report(9, pass,
         fmt("ar(1): |qT - 0.9| <= 0.07 in %d/50 seeds (worst %.4f); "
             "phi_hat=%.4f within 0.02 of 0.5, %.2fs",
             hits, worst, phi_hat, elapsed));
}

void criterion_10_monotonicity() {
  bool pass = true;
  std::string detail = "monotonicity:";

  // benchmark estimates nonincreasing in q, independent samples per point
  {
    const MixtureModel mixture = MixtureModel::testing();
    Rng rng(111);
    std::vector<double> values, ses;
    for (double q = 0.0; q <= 0.9; q += 0.1) {
      std::vector<double> w(100000);
      StreamSampler sampler(StreamSpec::testing_mixture(mixture), rng.next_u64());
      for (double& v : w) v = 1.0 - true_lfdr(mixture, sampler.next().x);
      const InformativeBenchmark bench(std::move(w), 1.0);
      values.push_back(bench.pi0(q));
      ses.push_back(bench.pi0_stderr(q));
    }
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (values[i] > values[i - 1] + 3.0 * (ses[i] + ses[i - 1])) pass = false;
    }
    detail += " benchmark nonincreasing ok;";
  }

  // informative selection monotone in q
  {
    Rng rng(112);
    bool mono = true;
    for (int i = 0; i < 20000; ++i) {
      const double w = rng.uniform01();
      const double q = rng.uniform01();
      const double q_hi = q + (1.0 - q) * rng.uniform01();
      if (!informative_select(w, q) && informative_select(w, q_hi)) mono = false;
    }
    if (!mono) pass = false;
    detail += " selection monotone ok;";
  }

  // interval length nondecreasing in q
  {
    double prev = 0.0;
    for (double q = 0.001; q < 1.0; q += 0.001) {
      const double len = regression_interval(0.0, 1.0, q, 1.0).length();
      if (len + 1e-12 < prev) pass = false;
      prev = len;
    }
    detail += " interval length ok;";
  }

  // score/interval round trip at 1e-9
  {
    bool round_trip = true;
    for (double q = 0.05; q < 1.0; q += 0.05) {
      const PredictionSet set = regression_interval(0.7, 1.9, q, 1.0);
      for (double y = 0.7 - 6.0; y <= 0.7 + 6.0; y += 0.0413) {
        const double score = adaptive_residual_score(0.7, 1.9, y, 1.0);
        if (score <= q - 1e-9 && !set.contains(y)) round_trip = false;
        if (score >= q + 1e-9 && set.contains(y)) round_trip = false;
      }
    }
    if (!round_trip) pass = false;
    detail += " score/interval round trip ok";
  }

  report(10, pass, detail);
}

}  // namespace

int main() {
  const auto t0 = Clock::now();

  criterion_1_adversarial();
  criterion_3_regress_oracle();
  criterion_4_testing();
  criterion_5_naive_selection();
  criterion_6_solver();
  criterion_7_reduction();
  criterion_8_restart();
  criterion_9_ar();
  criterion_10_monotonicity();

  // every step of every run above feeds the envelope check
  report(2, g_envelope_violations == 0,
         fmt("threshold envelope: %lld violations across %lld steps",
             static_cast<long long>(g_envelope_violations),
             static_cast<long long>(g_envelope_steps)));

  std::printf("acceptance: %s (%d failure%s, %.1fs)\n",
              g_failures == 0 ? "ALL CRITERIA PASS" : "FAILURES PRESENT",
              g_failures, g_failures == 1 ? "" : "s", seconds_since(t0));
  return g_failures == 0 ? 0 : 1;
}
