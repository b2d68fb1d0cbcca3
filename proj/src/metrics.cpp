#include "selcon/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "selcon/errors.hpp"

namespace selcon {

double fcp(std::span<const TraceRecord> trace) {
  double err_sum = 0.0;
  std::int64_t selected = 0;
  for (const auto& rec : trace) {
    if (rec.selected) {
      err_sum += rec.err;
      ++selected;
    }
  }
  return err_sum / static_cast<double>(std::max<std::int64_t>(1, selected));
}

double fcp_bound(std::int64_t j, const StepSchedule& schedule, double score_bound,
                 double alpha) {
  require(j >= 1, "fcp_bound: selection counter must be >= 1");
  const double gamma_1 = schedule.gamma(1);
  const double gamma_j = schedule.gamma(j);
  return alpha + (score_bound + gamma_1) / (static_cast<double>(j) * gamma_j);
}

double fcp_bound_general(std::int64_t j, const StepSchedule& schedule,
                         double score_bound, double alpha) {
  require(j >= 1, "fcp_bound_general: selection counter must be >= 1");
  double gamma_max = schedule.gamma(1);
  double variation = 1.0 / schedule.gamma(1);
  double prev_inv = variation;
  for (std::int64_t i = 2; i <= j; ++i) {
    const double g = schedule.gamma(i);
    gamma_max = std::max(gamma_max, g);
    const double inv = 1.0 / g;
    variation += std::abs(inv - prev_inv);
    prev_inv = inv;
  }
  return alpha + (score_bound + gamma_max) / static_cast<double>(j) * variation;
}

TraceSummary summarize(std::span<const TraceRecord> trace, double q0_ref,
                       double band) {
  require(!trace.empty(), "summarize: empty trace");
  TraceSummary s;
  s.final_fcp = trace.back().fcp;
  s.final_q = trace.back().q;

  std::int64_t selected = 0;
  double ier_sum = 0.0;
  std::int64_t ier_count = 0;
  for (const auto& rec : trace) {
    if (rec.selected) ++selected;
    if (!std::isnan(rec.ier)) {
      ier_sum += rec.ier;
      ++ier_count;
    }
  }
  s.selection_rate = static_cast<double>(selected) / static_cast<double>(trace.size());
  if (ier_count > 0) s.mean_ier = ier_sum / static_cast<double>(ier_count);

  if (!std::isnan(q0_ref)) {
    std::int64_t first_inside = -1;
    for (std::size_t i = trace.size(); i-- > 0;) {
      if (std::abs(trace[i].q - q0_ref) <= band) {
        first_inside = trace[i].t;
      } else {
        break;
      }
    }
    s.time_to_converge = first_inside;
  }
  return s;
}

std::int64_t count_fcp_bound_violations(std::span<const TraceRecord> trace,
                                        const StepSchedule& schedule,
                                        double score_bound, double alpha,
                                        double tol) {
  std::int64_t violations = 0;
  double err_sum = 0.0;
  std::int64_t selected = 0;
  std::int64_t j = 1;
  for (const auto& rec : trace) {
    const double bound = fcp_bound(j, schedule, score_bound, alpha);
    if (rec.selected) {
      err_sum += rec.err;
      ++selected;
    }
    const double running =
        err_sum / static_cast<double>(std::max<std::int64_t>(1, selected));
    if (running > bound + tol) ++violations;
    if (rec.selected) ++j;
    if (rec.restarted) {
      // New segment: the recursion restarted with a fresh counter.
      err_sum = 0.0;
      selected = 0;
      j = 1;
    }
  }
  return violations;
}

std::int64_t count_threshold_violations(std::span<const TraceRecord> trace,
                                        const StepSchedule& schedule,
                                        double score_bound, double alpha,
                                        double tol) {
  const double gamma_1 = schedule.gamma(1);
  const double lo = -alpha * gamma_1 - tol;
  const double hi = score_bound + (1.0 - alpha) * gamma_1 + tol;
  std::int64_t violations = 0;
  for (const auto& rec : trace) {
    if (rec.q < lo || rec.q > hi) ++violations;
  }
  return violations;
}

}  // namespace selcon
