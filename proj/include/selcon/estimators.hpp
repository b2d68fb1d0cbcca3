#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "selcon/errors.hpp"

// Adaptive estimators refreshed only from past data: an incremental Gaussian
// naive Bayes classifier, a Nadaraya-Watson kernel regressor, and a ridge
// autoregressive fitter.

namespace selcon {

// Per-class, per-feature Gaussian moments maintained incrementally (Welford).
// Variances are sample variances floored at var_floor; priors come from the
// class counts.
class GaussianNb {
 public:
  GaussianNb(int num_classes, int dim, double var_floor = 1e-6);

  void update(std::span<const double> x, int label);

  // Bayes posterior under independent per-feature Gaussians. Throws if some
  // class has no observations yet.
  std::vector<double> posterior(std::span<const double> x) const;

  // Largest posterior component, the informative test statistic.
  double max_posterior(std::span<const double> x) const;

  // Posterior of class 0, the estimated local false discovery rate.
  double lfdr(std::span<const double> x) const;

  std::int64_t count(int label) const { return counts_[label]; }
  std::int64_t total_count() const { return total_; }
  int num_classes() const { return num_classes_; }
  int dim() const { return dim_; }
  double mean(int label, int feature) const;
  double variance(int label, int feature) const;  // floored sample variance

 private:
  int num_classes_;
  int dim_;
  double var_floor_;
  std::int64_t total_ = 0;
  std::vector<std::int64_t> counts_;
  std::vector<double> means_;  // [label * dim + feature]
  std::vector<double> m2_;     // sum of squared deviations, same layout
};

// Gaussian-kernel regressor over the stored past sample, with the bandwidth
// shrinking as h = bandwidth_scale * n^(-1/(2+d)). The spread estimate is
// floored at sigma_floor; with no usable weights the prediction falls back to
// the global mean (or 0 when empty) with unit spread.
class KernelRegressor {
 public:
  explicit KernelRegressor(int dim, double bandwidth_scale = 1.0,
                           double sigma_floor = 1e-3);

  void add(std::span<const double> x, double y);

  struct Prediction {
    double mu = 0.0;
    double sigma = 1.0;
  };
  Prediction predict(std::span<const double> x) const;

  double bandwidth() const;
  std::int64_t size() const { return static_cast<std::int64_t>(ys_.size()); }
  int dim() const { return dim_; }

 private:
  int dim_;
  double bandwidth_scale_;
  double sigma_floor_;
  std::vector<double> xs_;  // flattened, row-major
  std::vector<double> ys_;
  double y_sum_ = 0.0;
};

// Incremental normal equations for ridge least squares on lagged designs.
// coefficients() solves (X'X + ridge*I) phi = X'y exactly; with ridge = 0 a
// singular design raises an error.
class ArEstimator {
 public:
  ArEstimator(int order, double ridge);

  void add(std::span<const double> lags, double y);
  std::vector<double> coefficients() const;

  int order() const { return order_; }
  std::int64_t size() const { return n_; }

 private:
  int order_;
  double ridge_;
  std::int64_t n_ = 0;
  std::vector<double> xtx_;  // order x order, row-major
  std::vector<double> xty_;
};

// Exact ridge fit of an AR(order) model to a scalar history: each y_t is
// regressed on the `order` preceding values.
std::vector<double> ar_fit(std::span<const double> history, int order,
                           double ridge);

// Rescaled residual score 2B*Phi(|y - mu|/sigma) - B, valued in (0, B) and
// strictly increasing in the absolute standardized residual.
double adaptive_residual_score(double mu_hat, double sigma_hat, double y,
                               double score_bound);

}  // namespace selcon
