#include "selcon/runner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "selcon/datagen.hpp"
#include "selcon/errors.hpp"
#include "selcon/estimators.hpp"
#include "selcon/normal.hpp"
#include "selcon/oracle.hpp"
#include "selcon/rules.hpp"

namespace selcon {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Salt for the rng used by in-run instantaneous-rate logging, so logging does
// not perturb the stream draws.
constexpr std::uint64_t kLogSalt = 0x1ECD15F0C0FFEEULL;

struct MuSigma {
  double mu = 0.0;
  double sigma = 1.0;
};

// Accumulates records and the running selected-error proportion; the bound
// column is the nonincreasing-step form evaluated at the current selection
// counter.
class TraceBuilder {
 public:
  TraceBuilder(const StepSchedule& schedule, double score_bound, double alpha,
               std::int64_t horizon)
      : schedule_(schedule), score_bound_(score_bound), alpha_(alpha) {
    records_.reserve(static_cast<std::size_t>(horizon));
  }

  void push(std::int64_t t, bool selected, double err, double q, std::int64_t j,
            double ier, double power, double aux, bool restarted) {
    if (selected) {
      err_sum_ += err;
      ++selected_;
    }
    TraceRecord rec;
    rec.t = t;
    rec.selected = selected;
    rec.err = selected ? err : kNaN;
    rec.q = q;
    rec.j = j;
    rec.fcp = err_sum_ / static_cast<double>(std::max<std::int64_t>(1, selected_));
    rec.bound = fcp_bound(j, schedule_, score_bound_, alpha_);
    rec.ier = ier;
    rec.power = power;
    rec.aux = aux;
    rec.restarted = restarted;
    records_.push_back(rec);
  }

  std::vector<TraceRecord> take() { return std::move(records_); }

 private:
  StepSchedule schedule_;
  double score_bound_;
  double alpha_;
  double err_sum_ = 0.0;
  std::int64_t selected_ = 0;
  std::vector<TraceRecord> records_;
};

SciState initial_state(const ExperimentConfig& cfg) {
  SciState state;
  state.q = cfg.q1;
  state.select_index = 1;
  state.t = 1;
  state.alpha = cfg.alpha;
  state.score_bound = cfg.score_bound;
  state.schedule = cfg.schedule();
  return state;
}

double restart_reset_q(const ExperimentConfig& cfg) {
  return std::isnan(cfg.restart.reset_q) ? cfg.q1 : cfg.restart.reset_q;
}

// Consecutive-freeze counter and reset logic shared by the informative
// experiments. Returns true when a restart fired.
bool maybe_restart(const ExperimentConfig& cfg, SciState& state, int& frozen,
                   int& restarts) {
  if (!cfg.restart.enabled) return false;
  if (state.q >= state.score_bound) {
    ++frozen;
  } else {
    frozen = 0;
    return false;
  }
  if (frozen < cfg.restart.patience) return false;
  state.q = restart_reset_q(cfg);
  state.select_index = 1;
  frozen = 0;
  ++restarts;
  return true;
}

bool log_now(const ExperimentConfig& cfg, std::int64_t t) {
  return cfg.ier_stride > 0 && t % cfg.ier_stride == 0;
}

// GNB posterior with a deterministic fallback while some class is still
// unobserved: a flat posterior, which keeps early selection conservative.
std::vector<double> guarded_posterior(const GaussianNb& model,
                                      std::span<const double> x) {
  for (int k = 0; k < model.num_classes(); ++k) {
    if (model.count(k) == 0) {
      return std::vector<double>(static_cast<std::size_t>(model.num_classes()),
                                 1.0 / model.num_classes());
    }
  }
  return model.posterior(x);
}

}  // namespace

ExperimentConfig default_config(Experiment experiment) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  switch (experiment) {
    case Experiment::Testing:
      cfg.restart.enabled = true;
      break;
    case Experiment::Classify:
      cfg.q1 = 0.8;
      cfg.schedule_c = 0.5;
      cfg.holdout = 10;
      cfg.horizon = 2000;
      cfg.restart.enabled = true;
      break;
    case Experiment::Regress:
      break;
    case Experiment::SelectPredict:
      // Levels at or below 1 - Phi(y0 - max mu) are unattainable for the
      // selection-by-prediction statistic; 0.2 sits above that floor for the
      // default y0 = 1 and mean range [0, 2]. The statistic tops out at
      // Phi(max mu - y0), so the step scale is kept small enough that a
      // single error cannot leap from the target threshold past that cap.
      cfg.alpha = 0.2;
      cfg.schedule_c = 0.25;
      cfg.restart.enabled = true;
      break;
    case Experiment::PredictLb:
      cfg.alpha = 0.2;
      cfg.schedule_c = 0.25;
      cfg.y0 = 0.5;
      cfg.restart.enabled = true;
      break;
    case Experiment::Ar:
      cfg.horizon = 20000;
      break;
  }
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  require(cfg.alpha > 0.0 && cfg.alpha < 1.0, "config: alpha must lie in (0,1)");
  require(cfg.score_bound > 0.0, "config: score bound must be positive");
  require(cfg.q1 >= 0.0 && cfg.q1 < cfg.score_bound,
          "config: q1 must lie in [0, score_bound)");
  require(cfg.horizon >= 1, "config: horizon must be >= 1");
  require(cfg.holdout >= 0, "config: holdout must be >= 0");
  require(cfg.schedule_c > 0.0, "config: schedule scale must be positive");
  require(cfg.schedule_beta > 0.0 && cfg.schedule_beta < 1.0,
          "config: schedule decay must lie in (0,1)");
  require(cfg.reps >= 1, "config: reps must be >= 1");
  require(cfg.ier_stride >= 0, "config: ier stride must be >= 0");
  if (cfg.ier_stride > 0) {
    require(cfg.ier_mc >= 1000, "config: ier_mc must be >= 1000");
  }
  require(cfg.mc_n >= 1000, "config: mc_n must be >= 1000");
  require(cfg.refit_stride >= 1, "config: refit stride must be >= 1");
  require(cfg.region_lo <= cfg.region_hi, "config: empty selection region");
  require(cfg.restart.patience >= 1, "config: restart patience must be >= 1");
  if (!cfg.class_weights.empty()) {
    require(cfg.class_weights.size() == 2, "config: need one weight per class");
    double total = 0.0;
    for (double w : cfg.class_weights) {
      require(w >= 0.0, "config: class weights must be nonnegative");
      total += w;
    }
    require(std::abs(total - 1.0) <= 1e-9, "config: class weights must sum to 1");
  }
  if (cfg.experiment == Experiment::Ar) {
    require(!cfg.ar_coeffs.empty(), "config: ar coefficients missing");
    require(cfg.ridge >= 0.0, "config: ridge must be nonnegative");
  }
}

// ---- online conformal testing -------------------------------------------

RunResult run_testing(const ExperimentConfig& cfg, std::uint64_t rep_seed) {
  validate(cfg);
  const MixtureModel mixture = MixtureModel::testing();
  const StreamSpec spec = StreamSpec::testing_mixture(mixture);
  StreamSampler stream(spec, rep_seed);
  std::vector<Observation> history = stream.take(cfg.holdout);

  GaussianNb model(2, 2);
  auto retrain = [&](const std::vector<Observation>& data) {
    model = GaussianNb(2, 2);
    for (const auto& ob : data) model.update(ob.x, static_cast<int>(ob.y));
  };
  if (cfg.mode != StatisticMode::Oracle) retrain(history);

  auto lfdr_hat = [&](std::span<const double> x) {
    if (cfg.mode == StatisticMode::Oracle) return true_lfdr(mixture, x);
    return guarded_posterior(model, x)[0];
  };

  // Only non-selected pairs feed the estimator, as the algorithm is written.
  const bool augment_all = cfg.augment == AugmentRule::All;

  SciState state = initial_state(cfg);
  TraceBuilder trace(state.schedule, state.score_bound, state.alpha, cfg.horizon);
  Rng log_rng(split_seed(rep_seed ^ kLogSalt, 0));
  int frozen = 0;
  int restarts = 0;

  for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
    const Observation ob = stream.next();
    const double lf = lfdr_hat(ob.x);
    const bool selected = state.q < state.score_bound && lf <= 1.0 - state.q;
    const double err = selected ? testing_error(static_cast<int>(ob.y)) : 0.0;

    double ier = kNaN;
    double power = kNaN;
    if (log_now(cfg, t)) {
      PolicySnapshot policy;
      policy.selects = [&](std::span<const double> x, double q) {
        return q < cfg.score_bound && lfdr_hat(x) <= 1.0 - q;
      };
      policy.predict = [](std::span<const double>, double) {
        return PredictionSet::label(1);
      };
      policy.error = [](const Observation& fresh, const PredictionSet&) {
        return testing_error(static_cast<int>(fresh.y));
      };
      ier = estimate_ier(spec, policy, state.q, cfg.ier_mc, log_rng);
      power = estimate_power(spec, policy, state.q, cfg.ier_mc, log_rng);
    }

    SciState next = step(state, selected, err);
    if ((!selected || augment_all) && cfg.mode == StatisticMode::Adaptive) {
      model.update(ob.x, static_cast<int>(ob.y));
    }
    history.push_back(ob);

    const bool restarted = maybe_restart(cfg, next, frozen, restarts);
    if (restarted && cfg.mode != StatisticMode::Oracle) retrain(history);

    trace.push(t, selected, err, state.q, state.select_index, ier, power, kNaN,
               restarted);
    state = next;
  }
  return {trace.take(), restarts, rep_seed};
}

// ---- online selective classification ------------------------------------

RunResult run_classify(const ExperimentConfig& cfg, std::uint64_t rep_seed) {
  validate(cfg);
  const MixtureModel mixture = MixtureModel::classification();
  const StreamSpec spec = StreamSpec::classif_mixture(mixture);
  StreamSampler stream(spec, rep_seed);
  std::vector<Observation> history = stream.take(cfg.holdout);

  GaussianNb model(2, 2);
  auto retrain = [&](const std::vector<Observation>& data) {
    model = GaussianNb(2, 2);
    for (const auto& ob : data) model.update(ob.x, static_cast<int>(ob.y));
  };
  if (cfg.mode != StatisticMode::Oracle) retrain(history);

  auto posterior = [&](std::span<const double> x) -> std::vector<double> {
    if (cfg.mode == StatisticMode::Oracle) {
      const double p1 = mixture_posterior_alt(mixture, x);
      return {1.0 - p1, p1};
    }
    return guarded_posterior(model, x);
  };

  // Every pair feeds the estimator, as the algorithm is written.
  const bool augment_unselected_only = cfg.augment == AugmentRule::Unselected;

  auto class_error = [&](int y, const PredictionSet& set) {
    if (cfg.class_weights.empty()) return label_coverage_error(y, set);
    return weighted_label_error(y, set, cfg.class_weights);
  };

  SciState state = initial_state(cfg);
  TraceBuilder trace(state.schedule, state.score_bound, state.alpha, cfg.horizon);
  Rng log_rng(split_seed(rep_seed ^ kLogSalt, 0));
  int frozen = 0;
  int restarts = 0;

  for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
    const Observation ob = stream.next();
    const auto post = posterior(ob.x);
    const int predicted = argmax_label(post);
    const double w_stat = post[static_cast<std::size_t>(predicted)];
    const bool selected =
        state.q < state.score_bound && informative_select(w_stat, state.q);
    const double err = selected ? class_error(static_cast<int>(ob.y),
                                              PredictionSet::label(predicted))
                                : 0.0;

    double ier = kNaN;
    double power = kNaN;
    if (log_now(cfg, t)) {
      PolicySnapshot policy;
      policy.selects = [&](std::span<const double> x, double q) {
        const auto p = posterior(x);
        return q < cfg.score_bound &&
               informative_select(p[static_cast<std::size_t>(argmax_label(p))], q);
      };
      policy.predict = [&](std::span<const double> x, double) {
        return PredictionSet::label(argmax_label(posterior(x)));
      };
      policy.error = [&](const Observation& fresh, const PredictionSet& set) {
        return class_error(static_cast<int>(fresh.y), set);
      };
      ier = estimate_ier(spec, policy, state.q, cfg.ier_mc, log_rng);
      power = estimate_selected_expectation(
          spec, policy, state.q, cfg.ier_mc, log_rng,
          [&](const Observation& fresh) {
            return static_cast<int>(fresh.y) == argmax_label(posterior(fresh.x))
                       ? 1.0
                       : 0.0;
          });
    }

    SciState next = step(state, selected, err);
    if ((!selected || !augment_unselected_only) && cfg.mode == StatisticMode::Adaptive) {
      model.update(ob.x, static_cast<int>(ob.y));
    }
    history.push_back(ob);

    const bool restarted = maybe_restart(cfg, next, frozen, restarts);
    if (restarted && cfg.mode != StatisticMode::Oracle) retrain(history);

    trace.push(t, selected, err, state.q, state.select_index, ier, power, kNaN,
               restarted);
    state = next;
  }
  return {trace.take(), restarts, rep_seed};
}

RunResult run_classify_aci_naive(const ExperimentConfig& cfg, std::uint64_t rep_seed) {
  validate(cfg);
  const MixtureModel mixture = MixtureModel::classification();
  StreamSampler stream(StreamSpec::classif_mixture(mixture), rep_seed);
  std::vector<Observation> history = stream.take(cfg.holdout);

  GaussianNb model(2, 2);
  auto retrain = [&]() {
    model = GaussianNb(2, 2);
    for (const auto& ob : history) model.update(ob.x, static_cast<int>(ob.y));
  };
  if (cfg.mode != StatisticMode::Oracle) retrain();

  auto posterior = [&](std::span<const double> x) -> std::vector<double> {
    if (cfg.mode == StatisticMode::Oracle) {
      const double p1 = mixture_posterior_alt(mixture, x);
      return {1.0 - p1, p1};
    }
    return guarded_posterior(model, x);
  };

  const StepSchedule schedule = cfg.schedule();
  TraceBuilder trace(schedule, cfg.score_bound, cfg.alpha, cfg.horizon);
  double q = cfg.q1;

  for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
    const Observation ob = stream.next();
    const auto post = posterior(ob.x);

    // Sublevel set over labels; forced empty below zero, everything at or
    // above the score bound.
    int set_size = 0;
    bool covered = false;
    if (q >= 0.0) {
      for (int k = 0; k < static_cast<int>(post.size()); ++k) {
        const double score = 1.0 - post[static_cast<std::size_t>(k)];
        if (score <= q) {
          ++set_size;
          if (k == static_cast<int>(ob.y)) covered = true;
        }
      }
    }
    const double err = covered ? 0.0 : 1.0;
    const bool selected_post_hoc = set_size == 1;

    // Classic decaying-step recursion: an update at every time step.
    const double gamma = schedule.gamma(t);
    const double q_used = q;
    q = q + gamma * (err - cfg.alpha);

    if (cfg.mode == StatisticMode::Adaptive) model.update(ob.x, static_cast<int>(ob.y));
    history.push_back(ob);

    trace.push(t, selected_post_hoc, err, q_used, t, kNaN, kNaN, kNaN, false);
  }
  return {trace.take(), 0, rep_seed};
}

// ---- regression with X-oriented selection --------------------------------

namespace {

std::function<MuSigma(std::span<const double>)> make_regression_estimator(
    const ExperimentConfig& cfg, const RegressionModel& model,
    const KernelRegressor& regressor) {
  if (cfg.mode == StatisticMode::Oracle) {
    return [&model](std::span<const double> x) -> MuSigma {
      return {model.mean(x), model.sd(x)};
    };
  }
  return [&regressor](std::span<const double> x) -> MuSigma {
    const auto pred = regressor.predict(x);
    return {pred.mu, pred.sigma};
  };
}

}  // namespace

RunResult run_regress(const ExperimentConfig& cfg, std::uint64_t rep_seed) {
  validate(cfg);
  const RegressionModel model = RegressionModel::default_instance();
  const StreamSpec spec = StreamSpec::regression(model);
  StreamSampler stream(spec, rep_seed);

  KernelRegressor regressor(model.dim);
  const auto holdout = stream.take(cfg.holdout);
  for (const auto& ob : holdout) regressor.add(ob.x, ob.y);
  const auto estimate = make_regression_estimator(cfg, model, regressor);

  auto selects_x = [&](std::span<const double> x, double mu_hat) {
    switch (cfg.regress_select) {
      case RegressSelect::All: return true;
      case RegressSelect::Region:
        return x[0] >= cfg.region_lo && x[0] <= cfg.region_hi;
      case RegressSelect::AdaptiveMean:
        return adaptive_mean_select(mu_hat, cfg.y0);
    }
    return true;
  };

  SciState state = initial_state(cfg);
  TraceBuilder trace(state.schedule, state.score_bound, state.alpha, cfg.horizon);
  Rng log_rng(split_seed(rep_seed ^ kLogSalt, 0));

  for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
    const Observation ob = stream.next();
    const MuSigma est = estimate(ob.x);
    const bool selected = selects_x(ob.x, est.mu);
    const PredictionSet set =
        regression_interval(est.mu, est.sigma, state.q, state.score_bound);
    const double err = selected ? coverage_error(ob.y, set) : 0.0;

    double ier = kNaN;
    if (log_now(cfg, t)) {
      PolicySnapshot policy;
      policy.selects = [&](std::span<const double> x, double) {
        return selects_x(x, estimate(x).mu);
      };
      policy.predict = [&](std::span<const double> x, double q) {
        const MuSigma e = estimate(x);
        return regression_interval(e.mu, e.sigma, q, cfg.score_bound);
      };
      policy.error = [](const Observation& fresh, const PredictionSet& s) {
        return coverage_error(fresh.y, s);
      };
      ier = estimate_ier(spec, policy, state.q, cfg.ier_mc, log_rng);
    }

    SciState next = step(state, selected, err);
    if (cfg.mode == StatisticMode::Adaptive &&
        (cfg.augment != AugmentRule::Unselected || !selected)) {
      regressor.add(ob.x, ob.y);
    }

    trace.push(t, selected, err, state.q, state.select_index, ier, kNaN, kNaN,
               false);
    state = next;
  }
  return {trace.take(), 0, rep_seed};
}

RunResult run_regress_aci(const ExperimentConfig& cfg, std::uint64_t rep_seed) {
  validate(cfg);
  const RegressionModel model = RegressionModel::default_instance();
  StreamSampler stream(StreamSpec::regression(model), rep_seed);

  KernelRegressor regressor(model.dim);
  const auto holdout = stream.take(cfg.holdout);
  for (const auto& ob : holdout) regressor.add(ob.x, ob.y);
  const auto estimate = make_regression_estimator(cfg, model, regressor);

  const StepSchedule schedule = cfg.schedule();
  TraceBuilder trace(schedule, cfg.score_bound, cfg.alpha, cfg.horizon);
  double q = cfg.q1;

  for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
    const Observation ob = stream.next();
    const MuSigma est = estimate(ob.x);
    // Referenced method: empty set below zero (a forced error), full line at
    // or above the bound.
    double err;
    if (q < 0.0) {
      err = 1.0;
    } else {
      err = coverage_error(
          ob.y, regression_interval(est.mu, est.sigma, q, cfg.score_bound));
    }
    const double gamma = schedule.gamma(t);
    const double q_used = q;
    q = q + gamma * (err - cfg.alpha);

    if (cfg.mode == StatisticMode::Adaptive) regressor.add(ob.x, ob.y);
    trace.push(t, true, err, q_used, t, kNaN, kNaN, kNaN, false);
  }
  return {trace.take(), 0, rep_seed};
}

// ---- selection by prediction (discoveries above y0) -----------------------

RunResult run_select_predict(const ExperimentConfig& cfg, std::uint64_t rep_seed) {
  validate(cfg);
  const RegressionModel model = RegressionModel::default_instance();
  const StreamSpec spec = StreamSpec::regression(model);
  StreamSampler stream(spec, rep_seed);

  KernelRegressor regressor(model.dim);
  std::vector<Observation> history = stream.take(cfg.holdout);
  auto retrain = [&]() {
    regressor = KernelRegressor(model.dim);
    for (const auto& ob : history) regressor.add(ob.x, ob.y);
  };
  retrain();
  const auto estimate = make_regression_estimator(cfg, model, regressor);

  auto w_stat = [&](std::span<const double> x) {
    return 1.0 - normal_cdf(cfg.y0 - estimate(x).mu);
  };

  const bool augment_all = cfg.augment == AugmentRule::All;

  SciState state = initial_state(cfg);
  TraceBuilder trace(state.schedule, state.score_bound, state.alpha, cfg.horizon);
  Rng log_rng(split_seed(rep_seed ^ kLogSalt, 0));
  int frozen = 0;
  int restarts = 0;

  for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
    const Observation ob = stream.next();
    const double w = w_stat(ob.x);
    const bool selected =
        state.q < state.score_bound && informative_select(w, state.q);
    // A selected outcome at or below y0 is a false discovery.
    const double err = selected ? (ob.y <= cfg.y0 ? 1.0 : 0.0) : 0.0;

    double ier = kNaN;
    double power = kNaN;
    if (log_now(cfg, t)) {
      PolicySnapshot policy;
      policy.selects = [&](std::span<const double> x, double q) {
        return q < cfg.score_bound && informative_select(w_stat(x), q);
      };
      policy.predict = [&](std::span<const double>, double) {
        return PredictionSet::lower_ray(cfg.y0);
      };
      policy.error = [&](const Observation& fresh, const PredictionSet&) {
        return fresh.y <= cfg.y0 ? 1.0 : 0.0;
      };
      ier = estimate_ier(spec, policy, state.q, cfg.ier_mc, log_rng);
      power = estimate_selected_expectation(
          spec, policy, state.q, cfg.ier_mc, log_rng,
          [&](const Observation& fresh) { return fresh.y > cfg.y0 ? 1.0 : 0.0; });
    }

    SciState next = step(state, selected, err);
    if ((!selected || augment_all) && cfg.mode == StatisticMode::Adaptive) {
      regressor.add(ob.x, ob.y);
    }
    history.push_back(ob);

    const bool restarted = maybe_restart(cfg, next, frozen, restarts);
    if (restarted && cfg.mode != StatisticMode::Oracle) retrain();

    trace.push(t, selected, err, state.q, state.select_index, ier, power, kNaN,
               restarted);
    state = next;
  }
  return {trace.take(), restarts, rep_seed};
}

// ---- selective regression with a predictive lower bound --------------------

RunResult run_predict_lb(const ExperimentConfig& cfg, std::uint64_t rep_seed) {
  validate(cfg);
  const RegressionModel model = RegressionModel::default_instance();
  const StreamSpec spec = StreamSpec::regression(model);
  StreamSampler stream(spec, rep_seed);

  KernelRegressor regressor(model.dim);
  std::vector<Observation> history = stream.take(cfg.holdout);
  auto retrain = [&]() {
    regressor = KernelRegressor(model.dim);
    for (const auto& ob : history) regressor.add(ob.x, ob.y);
  };
  retrain();
  const auto estimate = make_regression_estimator(cfg, model, regressor);

  auto lower_bound_at = [&](std::span<const double> x, double q) {
    return estimate(x).mu + normal_quantile(1.0 - q);
  };

  // Every pair feeds the estimator, as the algorithm is written.
  const bool augment_unselected_only = cfg.augment == AugmentRule::Unselected;

  SciState state = initial_state(cfg);
  TraceBuilder trace(state.schedule, state.score_bound, state.alpha, cfg.horizon);
  Rng log_rng(split_seed(rep_seed ^ kLogSalt, 0));
  int frozen = 0;
  int restarts = 0;

  for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
    const Observation ob = stream.next();
    const double lb = lower_bound_at(ob.x, state.q);
    const bool selected = state.q < state.score_bound && lb > cfg.y0;
    const PredictionSet set = PredictionSet::lower_ray(lb);
    const double err = selected ? coverage_error(ob.y, set) : 0.0;
    // Implied false-discovery indicator for the selected times.
    const double aux = selected ? (ob.y <= cfg.y0 ? 1.0 : 0.0) : kNaN;

    double ier = kNaN;
    double power = kNaN;
    if (log_now(cfg, t)) {
      PolicySnapshot policy;
      policy.selects = [&](std::span<const double> x, double q) {
        return q < cfg.score_bound && lower_bound_at(x, q) > cfg.y0;
      };
      policy.predict = [&](std::span<const double> x, double q) {
        return PredictionSet::lower_ray(lower_bound_at(x, q));
      };
      policy.error = [](const Observation& fresh, const PredictionSet& s) {
        return coverage_error(fresh.y, s);
      };
      ier = estimate_ier(spec, policy, state.q, cfg.ier_mc, log_rng);
      power = estimate_selected_expectation(
          spec, policy, state.q, cfg.ier_mc, log_rng,
          [&](const Observation& fresh) { return fresh.y > cfg.y0 ? 1.0 : 0.0; });
    }

    SciState next = step(state, selected, err);
    if ((!selected || !augment_unselected_only) && cfg.mode == StatisticMode::Adaptive) {
      regressor.add(ob.x, ob.y);
    }
    history.push_back(ob);

    const bool restarted = maybe_restart(cfg, next, frozen, restarts);
    if (restarted && cfg.mode != StatisticMode::Oracle) retrain();

    trace.push(t, selected, err, state.q, state.select_index, ier, power, aux,
               restarted);
    state = next;
  }
  return {trace.take(), restarts, rep_seed};
}

// ---- autoregressive model, no selection -----------------------------------

RunResult run_ar(const ExperimentConfig& cfg, std::uint64_t rep_seed) {
  validate(cfg);
  const int order = static_cast<int>(cfg.ar_coeffs.size());
  const StreamSpec spec = StreamSpec::ar_process({cfg.ar_coeffs, 1000});
  StreamSampler stream(spec, rep_seed);

  ArEstimator accumulator(order, cfg.ridge);
  const auto holdout = stream.take(cfg.holdout);
  for (const auto& ob : holdout) accumulator.add(ob.x, ob.y);

  std::vector<double> phi_hat;
  if (cfg.mode == StatisticMode::Oracle) {
    phi_hat = cfg.ar_coeffs;
  } else if (accumulator.size() > 0 || cfg.ridge > 0.0) {
    phi_hat = accumulator.coefficients();
  } else {
    phi_hat.assign(static_cast<std::size_t>(order), 0.0);
  }

  auto mu_at = [&](std::span<const double> lags) {
    double mu = 0.0;
    for (int k = 0; k < order; ++k) mu += phi_hat[static_cast<std::size_t>(k)] * lags[static_cast<std::size_t>(k)];
    return mu;
  };

  SciState state = initial_state(cfg);
  TraceBuilder trace(state.schedule, state.score_bound, state.alpha, cfg.horizon);
  Rng log_rng(split_seed(rep_seed ^ kLogSalt, 0));

  for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
    const Observation ob = stream.next();
    const double mu = mu_at(ob.x);
    const PredictionSet set =
        regression_interval(mu, 1.0, state.q, state.score_bound);
    const double err = coverage_error(ob.y, set);

    double ier = kNaN;
    if (log_now(cfg, t)) {
      PolicySnapshot policy;
      policy.selects = [](std::span<const double>, double) { return true; };
      policy.predict = [&](std::span<const double> x, double q) {
        return regression_interval(mu_at(x), 1.0, q, cfg.score_bound);
      };
      policy.error = [](const Observation& fresh, const PredictionSet& s) {
        return coverage_error(fresh.y, s);
      };
      ier = estimate_ier(spec, policy, state.q, cfg.ier_mc, log_rng);
    }

    SciState next = step(state, true, err);
    if (cfg.mode == StatisticMode::Adaptive) {
      accumulator.add(ob.x, ob.y);
      if (t % cfg.refit_stride == 0) phi_hat = accumulator.coefficients();
    }

    trace.push(t, true, err, state.q, state.select_index, ier, kNaN, kNaN, false);
    state = next;
  }
  return {trace.take(), 0, rep_seed};
}

RunResult run_experiment(const ExperimentConfig& cfg, std::uint64_t rep_seed) {
  switch (cfg.experiment) {
    case Experiment::Testing: return run_testing(cfg, rep_seed);
    case Experiment::Classify: return run_classify(cfg, rep_seed);
    case Experiment::Regress: return run_regress(cfg, rep_seed);
    case Experiment::SelectPredict: return run_select_predict(cfg, rep_seed);
    case Experiment::PredictLb: return run_predict_lb(cfg, rep_seed);
    case Experiment::Ar: return run_ar(cfg, rep_seed);
  }
  throw contract_violation("run_experiment: unknown experiment");
}

// ---- reference thresholds -------------------------------------------------

double reference_threshold(const ExperimentConfig& cfg) {
  const std::uint64_t sample_seed = split_seed(cfg.seed, 0xFFFFULL);
  switch (cfg.experiment) {
    case Experiment::Regress:
    case Experiment::Ar:
    case Experiment::PredictLb:
      // Standard normal noise: the benchmark map is q -> 1 - q.
      return 1.0 - cfg.alpha;
    case Experiment::Testing: {
      const MixtureModel mixture = MixtureModel::testing();
      StreamSampler sampler(StreamSpec::testing_mixture(mixture), sample_seed);
      std::vector<double> w(static_cast<std::size_t>(cfg.mc_n));
      for (double& v : w) v = 1.0 - true_lfdr(mixture, sampler.next().x);
      const double support_max = *std::max_element(w.begin(), w.end());
      try {
        return solve_q0_informative(cfg.alpha,
                                    InformativeBenchmark(std::move(w), support_max));
      } catch (const std::runtime_error&) {
        return kNaN;
      }
    }
    case Experiment::Classify: {
      const MixtureModel mixture = MixtureModel::classification();
      StreamSampler sampler(StreamSpec::classif_mixture(mixture), sample_seed);
      std::vector<double> w(static_cast<std::size_t>(cfg.mc_n));
      for (double& v : w) {
        const double p1 = mixture_posterior_alt(mixture, sampler.next().x);
        v = std::max(p1, 1.0 - p1);
      }
      const double support_max = *std::max_element(w.begin(), w.end());
      try {
        return solve_q0_informative(cfg.alpha,
                                    InformativeBenchmark(std::move(w), support_max));
      } catch (const std::runtime_error&) {
        return kNaN;
      }
    }
    case Experiment::SelectPredict: {
      const RegressionModel model = RegressionModel::default_instance();
      StreamSampler sampler(StreamSpec::regression(model), sample_seed);
      std::vector<double> w(static_cast<std::size_t>(cfg.mc_n));
      for (double& v : w) {
        const Observation ob = sampler.next();
        v = 1.0 - normal_cdf(cfg.y0 - model.mean(ob.x));
      }
      const double support_max = *std::max_element(w.begin(), w.end());
      try {
        return solve_q0_informative(cfg.alpha,
                                    InformativeBenchmark(std::move(w), support_max));
      } catch (const std::runtime_error&) {
        return kNaN;
      }
    }
  }
  return kNaN;
}

// ---- adversarial stress harness -------------------------------------------

std::vector<AdversarialWiring> all_adversarial_wirings() {
  return {AdversarialWiring::RegressAll,     AdversarialWiring::RegressRegion,
          AdversarialWiring::Classify,       AdversarialWiring::Testing,
          AdversarialWiring::TestingAdaptive, AdversarialWiring::SelectPredict,
          AdversarialWiring::PredictLb};
}

std::string wiring_name(AdversarialWiring wiring) {
  switch (wiring) {
    case AdversarialWiring::RegressAll: return "regress_all";
    case AdversarialWiring::RegressRegion: return "regress_region";
    case AdversarialWiring::Classify: return "classify";
    case AdversarialWiring::Testing: return "testing";
    case AdversarialWiring::TestingAdaptive: return "testing_adaptive";
    case AdversarialWiring::SelectPredict: return "select_predict";
    case AdversarialWiring::PredictLb: return "predict_lb";
  }
  return "unknown";
}

RunResult run_adversarial_one(const AdversarialConfig& acfg,
                              AdversarialWiring wiring, std::uint64_t seed) {
  Rng rng(seed);
  SciState state;
  state.q = acfg.q1;
  state.alpha = acfg.alpha;
  state.score_bound = acfg.score_bound;
  state.schedule = acfg.schedule;

  const MixtureModel classif = MixtureModel::classification();
  const MixtureModel testing = MixtureModel::testing();
  StreamSampler mixture_stream(
      wiring == AdversarialWiring::Classify
          ? StreamSpec::classif_mixture(classif)
          : StreamSpec::testing_mixture(testing),
      rng.next_u64());

  // The adaptive wiring trains on a genuine holdout, then keeps learning from
  // the adversarial pairs it is fed.
  GaussianNb gnb(2, 2);
  if (wiring == AdversarialWiring::TestingAdaptive) {
    for (const auto& ob : mixture_stream.take(50)) {
      gnb.update(ob.x, static_cast<int>(ob.y));
    }
  }

  TraceBuilder trace(acfg.schedule, acfg.score_bound, acfg.alpha, acfg.steps);
  ExperimentConfig restart_cfg;  // reuse reset semantics for maybe_restart
  restart_cfg.q1 = acfg.q1;
  restart_cfg.restart = acfg.restart;
  int frozen = 0;
  int restarts = 0;

  for (std::int64_t t = 1; t <= acfg.steps; ++t) {
    bool selected = false;
    double err = 0.0;

    switch (wiring) {
      case AdversarialWiring::RegressAll:
      case AdversarialWiring::RegressRegion: {
        const double x0 = rng.uniform01();
        selected = wiring == AdversarialWiring::RegressAll || x0 <= 0.5;
        const PredictionSet set = regression_interval(
            2.0 * x0, 1.0, state.q, state.score_bound);
        if (selected) {
          const double y = adversarial_outcome(set, 2);
          err = coverage_error(y, set);
        }
        break;
      }
      case AdversarialWiring::Classify: {
        const Observation ob = mixture_stream.next();
        const double p1 = mixture_posterior_alt(classif, ob.x);
        const int predicted = p1 > 1.0 - p1 ? 1 : 0;
        const double w = std::max(p1, 1.0 - p1);
        selected = state.q < state.score_bound && informative_select(w, state.q);
        if (selected) {
          const PredictionSet set = PredictionSet::label(predicted);
          const int y = static_cast<int>(adversarial_outcome(set, 2));
          err = label_coverage_error(y, set);
        }
        break;
      }
      case AdversarialWiring::Testing: {
        const Observation ob = mixture_stream.next();
        const double lf = true_lfdr(testing, ob.x);
        selected = state.q < state.score_bound && lf <= 1.0 - state.q;
        if (selected) err = testing_error(0);  // every discovery is false
        break;
      }
      case AdversarialWiring::TestingAdaptive: {
        const Observation ob = mixture_stream.next();
        const double lf = guarded_posterior(gnb, ob.x)[0];
        selected = state.q < state.score_bound && lf <= 1.0 - state.q;
        if (selected) {
          err = testing_error(0);
        } else {
          gnb.update(ob.x, 0);  // the adversary reveals only nulls
        }
        break;
      }
      case AdversarialWiring::SelectPredict: {
        const double x0 = rng.uniform01();
        const double w = 1.0 - normal_cdf(acfg.y0 - 2.0 * x0);
        selected = state.q < state.score_bound && informative_select(w, state.q);
        if (selected) err = 1.0;  // y = y0 is never a true discovery
        break;
      }
      case AdversarialWiring::PredictLb: {
        const double x0 = rng.uniform01();
        const double lb = 2.0 * x0 + normal_quantile(1.0 - state.q);
        selected = state.q < state.score_bound && lb > acfg.y0;
        if (selected) {
          const PredictionSet set = PredictionSet::lower_ray(lb);
          const double y = adversarial_outcome(set, 2);
          err = coverage_error(y, set);
        }
        break;
      }
    }

    SciState next = step(state, selected, err);
    const bool restarted = maybe_restart(restart_cfg, next, frozen, restarts);
    trace.push(t, selected, err, state.q, state.select_index, kNaN, kNaN, kNaN,
               restarted);
    state = next;
  }
  return {trace.take(), restarts, seed};
}

AdversarialReport run_adversarial_suite(const AdversarialConfig& acfg) {
  AdversarialReport report;
  std::uint64_t run_index = 0;
  for (const auto wiring : acfg.wirings) {
    for (int s = 0; s < acfg.seeds; ++s) {
      const std::uint64_t seed = split_seed(acfg.master_seed, run_index++);
      const RunResult result = run_adversarial_one(acfg, wiring, seed);
      ++report.runs;
      report.steps_checked += static_cast<std::int64_t>(result.trace.size());

      const std::int64_t fcp_bad = count_fcp_bound_violations(
          result.trace, acfg.schedule, acfg.score_bound, acfg.alpha);
      const std::int64_t thr_bad = count_threshold_violations(
          result.trace, acfg.schedule, acfg.score_bound, acfg.alpha);
      report.fcp_violations += fcp_bad;
      report.threshold_violations += thr_bad;
      for (const auto& rec : result.trace) {
        report.max_fcp_slack = std::max(report.max_fcp_slack, rec.fcp - rec.bound);
      }
      if ((fcp_bad > 0 || thr_bad > 0) && report.first_violation.empty()) {
        report.first_violation =
            wiring_name(wiring) + " seed=" + std::to_string(seed);
      }
    }
  }
  return report;
}

}  // namespace selcon
