#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "selcon/sci.hpp"

// Running error metrics over per-step traces, plus the theoretical bound on
// the selected-error proportion as a function of the selection count.

namespace selcon {

struct TraceRecord {
  std::int64_t t = 0;
  bool selected = false;
  double err = 0.0;     // meaningful only when selected
  double q = 0.0;       // threshold used at time t
  std::int64_t j = 1;   // selection counter J(t), before processing time t
  double fcp = 0.0;     // error proportion over selected times up to t
  double bound = 0.0;   // alpha + (B + gamma_1) / (J(t) * gamma_J(t))
  double ier = std::numeric_limits<double>::quiet_NaN();    // logged at strides
  double power = std::numeric_limits<double>::quiet_NaN();  // logged at strides
  double aux = std::numeric_limits<double>::quiet_NaN();    // experiment extra
  bool restarted = false;  // a restart fired while processing this step
};

// Average error over selected times: sum(err_k * S_k) / max(1, sum S_k).
double fcp(std::span<const TraceRecord> trace);

// Bound for nonincreasing step sequences: alpha + (B + gamma_1)/(J gamma_J).
double fcp_bound(std::int64_t j, const StepSchedule& schedule, double score_bound,
                 double alpha);

// General form, valid for any positive step sequence:
// alpha + (B + max_j gamma_j)/J * (1/gamma_1 + sum_{i=2..J} |1/gamma_i - 1/gamma_{i-1}|).
double fcp_bound_general(std::int64_t j, const StepSchedule& schedule,
                         double score_bound, double alpha);

struct TraceSummary {
  double final_fcp = 0.0;
  double final_q = 0.0;
  double selection_rate = 0.0;
  double mean_ier = std::numeric_limits<double>::quiet_NaN();
  // First t such that |q_s - q0_ref| <= band for all s >= t; -1 if never or
  // if q0_ref is NaN.
  std::int64_t time_to_converge = -1;
};

TraceSummary summarize(std::span<const TraceRecord> trace, double q0_ref,
                       double band);

// Steps where the running selected-error proportion exceeds its bound beyond
// the tolerance. Restarted traces are checked segment-wise, each segment with
// its own selection counter and error sums.
std::int64_t count_fcp_bound_violations(std::span<const TraceRecord> trace,
                                        const StepSchedule& schedule,
                                        double score_bound, double alpha,
                                        double tol = 1e-12);

// Steps where the threshold leaves [-alpha*gamma_1, B + (1-alpha)*gamma_1].
std::int64_t count_threshold_violations(std::span<const TraceRecord> trace,
                                        const StepSchedule& schedule,
                                        double score_bound, double alpha,
                                        double tol = 1e-12);

}  // namespace selcon
