#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "selcon/errors.hpp"

// Selection-gated threshold recursion. The threshold moves only at selected
// times, by gamma_J * (react - alpha), where J counts selections so far and
// react equals the realized error except that it is forced to 1 whenever the
// threshold is negative. The trajectory stays inside a fixed band around
// [0, B] for any input sequence; see threshold_bounds.

namespace selcon {

// Power-law step sequence gamma_j = scale * j^(-decay), strictly positive and
// nonincreasing for decay in (0, 1).
struct StepSchedule {
  double scale = 1.0;
  double decay = 0.75;

  double gamma(std::int64_t j) const {
    require(j >= 1, "StepSchedule::gamma: index must be >= 1");
    return scale * std::pow(static_cast<double>(j), -decay);
  }
};

struct SciState {
  double q = 0.5;                   // current threshold
  std::int64_t select_index = 1;    // one plus the number of selections so far
  std::int64_t t = 1;               // time index, for trace alignment only
  double alpha = 0.1;               // target error level, in (0, 1)
  double score_bound = 1.0;         // B, upper bound of the score range
  StepSchedule schedule;
};

struct ThresholdBounds {
  double lo = 0.0;
  double hi = 0.0;
};

// Update signal: the realized error while the threshold is nonnegative, and a
// forced error (1) below zero so the threshold always climbs back.
inline double react(double err_value, double q) {
  require(err_value >= 0.0 && err_value <= 1.0,
          "react: err_value must lie in [0,1]");
  return q >= 0.0 ? err_value : 1.0;
}

// One step of the recursion. When not selected, only the time index moves.
// err_value is ignored in that case.
inline SciState step(const SciState& state, bool selected, double err_value) {
  SciState next = state;
  next.t = state.t + 1;
  if (selected) {
    const double gamma = state.schedule.gamma(state.select_index);
    next.q = state.q + gamma * (react(err_value, state.q) - state.alpha);
    next.select_index = state.select_index + 1;
  }
  return next;
}

// Envelope the threshold can never leave: [-alpha*g, B + (1-alpha)*g] with
// g = max step size used so far. Power-law schedules are nonincreasing, so
// the max is gamma_1 = scale.
inline ThresholdBounds threshold_bounds(const SciState& state) {
  const double gamma_max = state.schedule.scale;
  return {-state.alpha * gamma_max,
          state.score_bound + (1.0 - state.alpha) * gamma_max};
}

// J(t) from a record of past selection indicators: their sum plus one.
inline std::int64_t selection_count(std::span<const bool> selections) {
  std::int64_t count = 1;
  for (bool s : selections) count += s ? 1 : 0;
  return count;
}

}  // namespace selcon
