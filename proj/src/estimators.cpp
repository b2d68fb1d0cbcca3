#include "selcon/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "selcon/normal.hpp"

namespace selcon {

GaussianNb::GaussianNb(int num_classes, int dim, double var_floor)
    : num_classes_(num_classes),
      dim_(dim),
      var_floor_(var_floor),
      counts_(num_classes, 0),
      means_(static_cast<std::size_t>(num_classes) * dim, 0.0),
      m2_(static_cast<std::size_t>(num_classes) * dim, 0.0) {
  require(num_classes >= 2, "GaussianNb: need at least two classes");
  require(dim >= 1, "GaussianNb: need at least one feature");
  require(var_floor > 0.0, "GaussianNb: var_floor must be positive");
}

void GaussianNb::update(std::span<const double> x, int label) {
  require(static_cast<int>(x.size()) == dim_, "GaussianNb::update: dimension mismatch");
  require(label >= 0 && label < num_classes_, "GaussianNb::update: label out of range");
  const std::int64_t n = ++counts_[label];
  ++total_;
  double* mean = &means_[static_cast<std::size_t>(label) * dim_];
  double* m2 = &m2_[static_cast<std::size_t>(label) * dim_];
  for (int f = 0; f < dim_; ++f) {
    const double delta = x[f] - mean[f];
    mean[f] += delta / static_cast<double>(n);
    m2[f] += delta * (x[f] - mean[f]);
  }
}

double GaussianNb::mean(int label, int feature) const {
  return means_[static_cast<std::size_t>(label) * dim_ + feature];
}

double GaussianNb::variance(int label, int feature) const {
  const std::int64_t n = counts_[label];
  if (n < 2) return var_floor_;
  const double raw = m2_[static_cast<std::size_t>(label) * dim_ + feature] /
                     static_cast<double>(n - 1);
  return std::max(raw, var_floor_);
}

std::vector<double> GaussianNb::posterior(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == dim_, "GaussianNb::posterior: dimension mismatch");
  for (int k = 0; k < num_classes_; ++k) {
    if (counts_[k] == 0) throw std::runtime_error("GaussianNb: untrained class");
  }
  static const double log_2pi = 1.8378770664093454836;
  std::vector<double> log_joint(num_classes_);
  for (int k = 0; k < num_classes_; ++k) {
    double lj = std::log(static_cast<double>(counts_[k]) / static_cast<double>(total_));
    for (int f = 0; f < dim_; ++f) {
      const double var = variance(k, f);
      const double d = x[f] - mean(k, f);
      lj += -0.5 * (log_2pi + std::log(var)) - 0.5 * d * d / var;
    }
    log_joint[k] = lj;
  }
  const double top = *std::max_element(log_joint.begin(), log_joint.end());
  double total = 0.0;
  std::vector<double> post(num_classes_);
  for (int k = 0; k < num_classes_; ++k) {
    post[k] = std::exp(log_joint[k] - top);
    total += post[k];
  }
  for (double& p : post) p /= total;
  return post;
}

double GaussianNb::max_posterior(std::span<const double> x) const {
  const auto post = posterior(x);
  return *std::max_element(post.begin(), post.end());
}

double GaussianNb::lfdr(std::span<const double> x) const { return posterior(x)[0]; }

KernelRegressor::KernelRegressor(int dim, double bandwidth_scale, double sigma_floor)
    : dim_(dim), bandwidth_scale_(bandwidth_scale), sigma_floor_(sigma_floor) {
  require(dim >= 1, "KernelRegressor: need at least one feature");
  require(bandwidth_scale > 0.0, "KernelRegressor: bandwidth_scale must be positive");
  require(sigma_floor > 0.0, "KernelRegressor: sigma_floor must be positive");
}

void KernelRegressor::add(std::span<const double> x, double y) {
  require(static_cast<int>(x.size()) == dim_, "KernelRegressor::add: dimension mismatch");
  xs_.insert(xs_.end(), x.begin(), x.end());
  ys_.push_back(y);
  y_sum_ += y;
}

double KernelRegressor::bandwidth() const {
  const double n = static_cast<double>(std::max<std::int64_t>(size(), 1));
  return bandwidth_scale_ * std::pow(n, -1.0 / (2.0 + dim_));
}

KernelRegressor::Prediction KernelRegressor::predict(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == dim_, "KernelRegressor::predict: dimension mismatch");
  const std::int64_t n = size();
  if (n == 0) return {0.0, 1.0};

  const double h = bandwidth();
  const double inv_2h2 = 1.0 / (2.0 * h * h);
  std::vector<double> weights(static_cast<std::size_t>(n));
  double weight_sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    double dist2 = 0.0;
    const double* xi = &xs_[static_cast<std::size_t>(i) * dim_];
    for (int f = 0; f < dim_; ++f) {
      const double d = x[f] - xi[f];
      dist2 += d * d;
    }
    const double w = std::exp(-dist2 * inv_2h2);
    weights[static_cast<std::size_t>(i)] = w;
    weight_sum += w;
  }
  if (weight_sum <= 0.0) {
    return {y_sum_ / static_cast<double>(n), 1.0};
  }

  double mu = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    mu += weights[static_cast<std::size_t>(i)] * ys_[static_cast<std::size_t>(i)];
  }
  mu /= weight_sum;

  double var = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double r = ys_[static_cast<std::size_t>(i)] - mu;
    var += weights[static_cast<std::size_t>(i)] * r * r;
  }
  var /= weight_sum;
  const double sigma = std::sqrt(std::max(var, sigma_floor_ * sigma_floor_));
  return {mu, sigma};
}

ArEstimator::ArEstimator(int order, double ridge)
    : order_(order),
      ridge_(ridge),
      xtx_(static_cast<std::size_t>(order) * order, 0.0),
      xty_(order, 0.0) {
  require(order >= 1, "ArEstimator: order must be >= 1");
  require(ridge >= 0.0, "ArEstimator: ridge must be nonnegative");
}

void ArEstimator::add(std::span<const double> lags, double y) {
  require(static_cast<int>(lags.size()) == order_, "ArEstimator::add: lag length mismatch");
  for (int i = 0; i < order_; ++i) {
    for (int j = 0; j < order_; ++j) {
      xtx_[static_cast<std::size_t>(i) * order_ + j] += lags[i] * lags[j];
    }
    xty_[i] += lags[i] * y;
  }
  ++n_;
}

std::vector<double> ArEstimator::coefficients() const {
  const int d = order_;
  std::vector<double> a(xtx_);
  std::vector<double> b(xty_);
  for (int i = 0; i < d; ++i) a[static_cast<std::size_t>(i) * d + i] += ridge_;

  // Gaussian elimination with partial pivoting.
  std::vector<int> perm(d);
  for (int i = 0; i < d; ++i) perm[i] = i;
  for (int col = 0; col < d; ++col) {
    int pivot = col;
    double best = std::abs(a[static_cast<std::size_t>(col) * d + col]);
    for (int r = col + 1; r < d; ++r) {
      const double v = std::abs(a[static_cast<std::size_t>(r) * d + col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best <= 1e-12) throw std::runtime_error("ArEstimator: singular design");
    if (pivot != col) {
      for (int j = 0; j < d; ++j) {
        std::swap(a[static_cast<std::size_t>(col) * d + j],
                  a[static_cast<std::size_t>(pivot) * d + j]);
      }
      std::swap(b[col], b[pivot]);
    }
    const double diag = a[static_cast<std::size_t>(col) * d + col];
    for (int r = col + 1; r < d; ++r) {
      const double factor = a[static_cast<std::size_t>(r) * d + col] / diag;
      if (factor == 0.0) continue;
      for (int j = col; j < d; ++j) {
        a[static_cast<std::size_t>(r) * d + j] -=
            factor * a[static_cast<std::size_t>(col) * d + j];
      }
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> phi(d, 0.0);
  for (int r = d - 1; r >= 0; --r) {
    double v = b[r];
    for (int j = r + 1; j < d; ++j) {
      v -= a[static_cast<std::size_t>(r) * d + j] * phi[j];
    }
    phi[r] = v / a[static_cast<std::size_t>(r) * d + r];
  }
  return phi;
}

std::vector<double> ar_fit(std::span<const double> history, int order, double ridge) {
  require(static_cast<int>(history.size()) > order,
          "ar_fit: history must be longer than the order");
  ArEstimator est(order, ridge);
  std::vector<double> lags(order);
  for (std::size_t t = static_cast<std::size_t>(order); t < history.size(); ++t) {
    for (int k = 0; k < order; ++k) lags[k] = history[t - 1 - static_cast<std::size_t>(k)];
    est.add(lags, history[t]);
  }
  return est.coefficients();
}

double adaptive_residual_score(double mu_hat, double sigma_hat, double y,
                               double score_bound) {
  require(sigma_hat > 0.0, "adaptive_residual_score: sigma_hat must be positive");
  require(score_bound > 0.0, "adaptive_residual_score: score_bound must be positive");
  const double z = std::abs(y - mu_hat) / sigma_hat;
  return 2.0 * score_bound * normal_cdf(z) - score_bound;
}

}  // namespace selcon
