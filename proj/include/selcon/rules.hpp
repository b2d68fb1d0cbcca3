#pragma once

#include <cmath>
#include <functional>
#include <span>

#include "selcon/errors.hpp"
#include "selcon/normal.hpp"
#include "selcon/prediction_set.hpp"

// Selection rules, prediction-set rules, and error functions: the pluggable
// decision surface around the threshold recursion.

namespace selcon {

// Two-sided interval for the rescaled-residual score with bound B:
// mu +/- sigma * PhiInv((q+B)/(2B)) for q in (0,B); the point prediction at
// q <= 0; the full line at q >= B.
inline PredictionSet regression_interval(double mu_hat, double sigma_hat,
                                         double q, double score_bound) {
  require(sigma_hat > 0.0, "regression_interval: sigma_hat must be positive");
  require(score_bound > 0.0, "regression_interval: score_bound must be positive");
  if (q >= score_bound) return PredictionSet::full();
  if (q <= 0.0) return PredictionSet::point(mu_hat);
  const double half_width =
      sigma_hat * normal_quantile((q + score_bound) / (2.0 * score_bound));
  return PredictionSet::interval(mu_hat - half_width, mu_hat + half_width);
}

// Argmax over class posteriors; ties go to the smallest label.
inline int argmax_label(std::span<const double> posteriors) {
  require(!posteriors.empty(), "argmax_label: empty posterior vector");
  int best = 0;
  for (int k = 1; k < static_cast<int>(posteriors.size()); ++k) {
    if (posteriors[k] > posteriors[best]) best = k;
  }
  return best;
}

inline int classify_point(std::span<const double> posteriors) {
  require(posteriors.size() >= 2, "classify_point: need at least two classes");
  double total = 0.0;
  for (double p : posteriors) total += p;
  require(std::abs(total - 1.0) <= 1e-9,
          "classify_point: posteriors must sum to 1");
  return argmax_label(posteriors);
}

// Informative rule 1{w > q}; always selects below zero since w >= 0.
inline bool informative_select(double w, double q) { return q < 0.0 || w > q; }

inline bool adaptive_mean_select(double mu_hat, double y_threshold) {
  return mu_hat >= y_threshold;
}

struct SelectionRule {
  enum class Kind { All, Region, AdaptiveMean, Informative };

  static SelectionRule all() { return {Kind::All, {}, 0.0}; }
  static SelectionRule region(std::function<bool(std::span<const double>)> pred) {
    return {Kind::Region, std::move(pred), 0.0};
  }
  static SelectionRule adaptive_mean(double y_threshold) {
    return {Kind::AdaptiveMean, {}, y_threshold};
  }
  static SelectionRule informative() { return {Kind::Informative, {}, 0.0}; }

  Kind kind = Kind::All;
  std::function<bool(std::span<const double>)> region_pred;
  double mean_threshold = 0.0;
};

// w_or_mu carries the test statistic W(x) for Informative and the mean
// estimate for AdaptiveMean; it is ignored otherwise.
inline bool select(const SelectionRule& rule, std::span<const double> x,
                   double q, double w_or_mu) {
  switch (rule.kind) {
    case SelectionRule::Kind::All: return true;
    case SelectionRule::Kind::Region: return rule.region_pred(x);
    case SelectionRule::Kind::AdaptiveMean:
      return adaptive_mean_select(w_or_mu, rule.mean_threshold);
    case SelectionRule::Kind::Informative:
      return informative_select(w_or_mu, q);
  }
  return false;
}

// Coverage error 1{y not in C}; the full space never errs, the empty set
// always does.
inline double coverage_error(double y, const PredictionSet& set) {
  return set.contains(y) ? 0.0 : 1.0;
}

inline double label_coverage_error(int y, const PredictionSet& set) {
  return set.contains_label(y) ? 0.0 : 1.0;
}

// Class-weighted error: w_y when the realized label is missed, 0 otherwise.
// Weights must be nonnegative and sum to 1, so values stay in [0,1].
inline double weighted_label_error(int y, const PredictionSet& set,
                                   std::span<const double> weights) {
  require(y >= 0 && y < static_cast<int>(weights.size()),
          "weighted_label_error: label out of range");
  return set.contains_label(y) ? 0.0 : weights[y];
}

// Error for conformal testing with the fixed alternative set {1}: a selected
// null (y = 0) is a false discovery.
inline double testing_error(int y) {
  require(y == 0 || y == 1, "testing_error: y must be binary");
  return 1.0 - static_cast<double>(y);
}

}  // namespace selcon
