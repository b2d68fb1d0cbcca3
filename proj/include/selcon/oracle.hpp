#pragma once

#include <functional>
#include <span>
#include <vector>

#include "selcon/datagen.hpp"
#include "selcon/prediction_set.hpp"
#include "selcon/rng.hpp"

// Benchmark machinery: the limiting threshold-to-error maps, their alpha
// crossings, the true local false discovery rate of the testing mixture, and
// Monte-Carlo estimates of the instantaneous error rate and power of a frozen
// policy against a known data-generating model.

namespace selcon {

// Benchmark map for the rescaled-residual regression score with B = 1:
// q -> 2*Fbar(PhibarInv((1-q)/2)) where Fbar is the noise upper tail. For
// standard normal noise this collapses to 1 - q.
double pi0_regression(double q);
double pi0_regression(double q,
                      const std::function<double(double)>& noise_upper_tail);

// Benchmark map for informative selection, built from a frozen Monte-Carlo
// sample of the limiting statistic W(X): q -> 1 - mean(W | W > q), equal to
// 1 - support_max when no sample point exceeds q. With a frozen sample the
// map is exactly nonincreasing in q, so bisection on it is well posed.
class InformativeBenchmark {
 public:
  InformativeBenchmark(std::vector<double> w_sample, double support_max);

  double pi0(double q) const;
  double mean_w() const;
  double support_min() const;  // kappa
  double support_max() const { return support_max_; }
  std::size_t sample_size() const { return sorted_.size(); }
  // Standard error of the conditional-mean estimate at q.
  double pi0_stderr(double q) const;

 private:
  std::vector<double> sorted_;
  std::vector<double> suffix_sum_;
  std::vector<double> suffix_sumsq_;
  double support_max_;
};

// Bisection for pi0(q) = alpha on a nonincreasing map over [lo, hi]. Stops
// when the residual drops below tol or the bracket width does; continuous
// maps reach the residual criterion, Monte-Carlo step maps the width one.
double solve_q0(double alpha, const std::function<double(double)>& pi0,
                double lo, double hi, double tol = 1e-6);

// Regression benchmark crossing; 1 - alpha exactly for standard normal noise.
double solve_q0_regression(double alpha, double tol = 1e-6);

// Crossing of an informative benchmark on [kappa, 1 - alpha]. Throws
// "level unattainable (criticality)" unless 1 - B* < alpha < 1 - E[W].
double solve_q0_informative(double alpha, const InformativeBenchmark& benchmark,
                            double tol = 1e-6);

// Bayes posterior P(Y = 0 | X = x) under a known two-component mixture.
double true_lfdr(const MixtureModel& model, std::span<const double> x);
double mixture_posterior_alt(const MixtureModel& model, std::span<const double> x);

// A frozen decision policy: selection, prediction set, and realized error,
// all as functions of a fresh observation and a fixed threshold.
struct PolicySnapshot {
  std::function<bool(std::span<const double> x, double q)> selects;
  std::function<PredictionSet(std::span<const double> x, double q)> predict;
  std::function<double(const Observation& ob, const PredictionSet& set)> error;
};

// Monte-Carlo estimate of E[err(Y, C(X,q)) | S(X,q) = 1] over fresh draws
// from the stream; 0 by convention when nothing is selected.
double estimate_ier(const StreamSpec& spec, const PolicySnapshot& policy,
                    double q, int mc_n, Rng& rng);

// Monte-Carlo estimate of E[Y * S(X,q)] for binary-outcome streams.
double estimate_power(const StreamSpec& spec, const PolicySnapshot& policy,
                      double q, int mc_n, Rng& rng);

// Monte-Carlo estimate of E[payoff(X,Y) * S(X,q)] for an arbitrary payoff,
// e.g. correct-selection probability in classification.
double estimate_selected_expectation(
    const StreamSpec& spec, const PolicySnapshot& policy, double q, int mc_n,
    Rng& rng, const std::function<double(const Observation&)>& payoff);

// |IER(snapshot) - IER(benchmark policy)| at q, zero outside [0, B]; a purely
// diagnostic distance between an adaptive policy and its limit.
double diagnostic_dt(const StreamSpec& spec, const PolicySnapshot& snapshot,
                     const PolicySnapshot& benchmark_policy, double q,
                     double score_bound, int mc_n, Rng& rng);

}  // namespace selcon
