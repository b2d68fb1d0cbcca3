#include "selcon/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "selcon/errors.hpp"
#include "selcon/normal.hpp"

namespace selcon {

double pi0_regression(double q, const std::function<double(double)>& noise_upper_tail) {
  require(q >= 0.0 && q <= 1.0, "pi0_regression: q must lie in [0,1]");
  // PhibarInv(p) = PhiInv(1 - p)
  const double threshold = normal_quantile(1.0 - (1.0 - q) / 2.0);
  return 2.0 * noise_upper_tail(threshold);
}

double pi0_regression(double q) {
  return pi0_regression(q, [](double v) { return normal_sf(v); });
}

InformativeBenchmark::InformativeBenchmark(std::vector<double> w_sample,
                                           double support_max)
    : sorted_(std::move(w_sample)), support_max_(support_max) {
  require(!sorted_.empty(), "InformativeBenchmark: empty sample");
  std::sort(sorted_.begin(), sorted_.end());
  const std::size_t n = sorted_.size();
  suffix_sum_.assign(n + 1, 0.0);
  suffix_sumsq_.assign(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    suffix_sum_[i] = suffix_sum_[i + 1] + sorted_[i];
    suffix_sumsq_[i] = suffix_sumsq_[i + 1] + sorted_[i] * sorted_[i];
  }
}

double InformativeBenchmark::pi0(double q) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), q);
  const std::size_t first = static_cast<std::size_t>(it - sorted_.begin());
  const std::size_t m = sorted_.size() - first;
  if (m == 0) return 1.0 - support_max_;
  return 1.0 - suffix_sum_[first] / static_cast<double>(m);
}

double InformativeBenchmark::pi0_stderr(double q) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), q);
  const std::size_t first = static_cast<std::size_t>(it - sorted_.begin());
  const std::size_t m = sorted_.size() - first;
  if (m < 2) return 0.0;
  const double mean = suffix_sum_[first] / static_cast<double>(m);
  const double var =
      std::max(0.0, suffix_sumsq_[first] / static_cast<double>(m) - mean * mean);
  return std::sqrt(var / static_cast<double>(m));
}

double InformativeBenchmark::mean_w() const {
  return suffix_sum_[0] / static_cast<double>(sorted_.size());
}

double InformativeBenchmark::support_min() const { return sorted_.front(); }

double solve_q0(double alpha, const std::function<double(double)>& pi0,
                double lo, double hi, double tol) {
  require(tol > 0.0, "solve_q0: tol must be positive");
  require(lo < hi, "solve_q0: empty bracket");
  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    const double value = pi0(mid);
    if (std::abs(value - alpha) <= tol || hi - lo <= tol) return mid;
    if (value > alpha) {
      lo = mid;  // map is nonincreasing, crossing lies to the right
    } else {
      hi = mid;
    }
  }
  return mid;
}

double solve_q0_regression(double alpha, double tol) {
  require(alpha > 0.0 && alpha < 1.0, "solve_q0_regression: alpha must lie in (0,1)");
  return solve_q0(alpha, [](double q) { return pi0_regression(q); }, 0.0, 1.0, tol);
}

double solve_q0_informative(double alpha, const InformativeBenchmark& benchmark,
                            double tol) {
  require(alpha > 0.0 && alpha < 1.0, "solve_q0_informative: alpha must lie in (0,1)");
  const double floor_level = 1.0 - benchmark.support_max();
  const double ceil_level = 1.0 - benchmark.mean_w();
  if (!(alpha > floor_level && alpha < ceil_level)) {
    throw std::runtime_error("solve_q0_informative: level unattainable (criticality)");
  }
  const double lo = benchmark.support_min();
  const double hi = 1.0 - alpha;
  return solve_q0(alpha, [&](double q) { return benchmark.pi0(q); }, lo, hi, tol);
}

double mixture_posterior_alt(const MixtureModel& model, std::span<const double> x) {
  require(x.size() == 2, "mixture posterior: covariate must be bivariate");
  if (model.p_alt <= 0.0) return 0.0;
  if (model.p_alt >= 1.0) return 1.0;
  auto sq_dist = [&](const std::array<double, 2>& c) {
    const double d0 = x[0] - c[0];
    const double d1 = x[1] - c[1];
    return d0 * d0 + d1 * d1;
  };
  // Identity covariances: the likelihood ratio depends only on the squared
  // distances to the two centers.
  const double log_ratio = std::log(model.p_alt / (1.0 - model.p_alt)) +
                           0.5 * (sq_dist(model.null_mean) - sq_dist(model.alt_mean));
  return 1.0 / (1.0 + std::exp(-log_ratio));
}

double true_lfdr(const MixtureModel& model, std::span<const double> x) {
  return 1.0 - mixture_posterior_alt(model, x);
}

double estimate_ier(const StreamSpec& spec, const PolicySnapshot& policy,
                    double q, int mc_n, Rng& rng) {
  require(mc_n >= 1000, "estimate_ier: mc_n must be at least 1000");
  StreamSampler sampler(spec, rng.next_u64());
  double err_sum = 0.0;
  std::int64_t selected = 0;
  for (int i = 0; i < mc_n; ++i) {
    const Observation ob = sampler.next();
    if (!policy.selects(ob.x, q)) continue;
    ++selected;
    err_sum += policy.error(ob, policy.predict(ob.x, q));
  }
  if (selected == 0) return 0.0;
  return err_sum / static_cast<double>(selected);
}

double estimate_power(const StreamSpec& spec, const PolicySnapshot& policy,
                      double q, int mc_n, Rng& rng) {
  require(mc_n >= 1000, "estimate_power: mc_n must be at least 1000");
  StreamSampler sampler(spec, rng.next_u64());
  double sum = 0.0;
  for (int i = 0; i < mc_n; ++i) {
    const Observation ob = sampler.next();
    if (policy.selects(ob.x, q)) sum += ob.y;
  }
  return sum / static_cast<double>(mc_n);
}

double estimate_selected_expectation(
    const StreamSpec& spec, const PolicySnapshot& policy, double q, int mc_n,
    Rng& rng, const std::function<double(const Observation&)>& payoff) {
  require(mc_n >= 1000, "estimate_selected_expectation: mc_n must be at least 1000");
  StreamSampler sampler(spec, rng.next_u64());
  double sum = 0.0;
  for (int i = 0; i < mc_n; ++i) {
    const Observation ob = sampler.next();
    if (policy.selects(ob.x, q)) sum += payoff(ob);
  }
  return sum / static_cast<double>(mc_n);
}

double diagnostic_dt(const StreamSpec& spec, const PolicySnapshot& snapshot,
                     const PolicySnapshot& benchmark_policy, double q,
                     double score_bound, int mc_n, Rng& rng) {
  if (q < 0.0 || q > score_bound) return 0.0;
  const double estimated = estimate_ier(spec, snapshot, q, mc_n, rng);
  const double benchmark = estimate_ier(spec, benchmark_policy, q, mc_n, rng);
  return std::abs(estimated - benchmark);
}

}  // namespace selcon
