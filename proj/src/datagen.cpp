#include "selcon/datagen.hpp"

#include <cmath>
#include <stdexcept>

#include "selcon/errors.hpp"

namespace selcon {

RegressionModel RegressionModel::default_instance() {
  RegressionModel m;
  m.dim = 2;
  m.mean = [](std::span<const double> x) { return 2.0 * x[0]; };
  m.sd = [](std::span<const double>) { return 1.0; };
  return m;
}

MixtureModel MixtureModel::classification() {
  return {0.5, {0.0, 0.0}, {1.0, 1.0}};
}

MixtureModel MixtureModel::testing() {
  return {0.2, {0.0, 0.0}, {3.0, 3.0}};
}

// Scaled Schur-Cohn test. Roots of the characteristic polynomial
// 1 - sum coeffs[k] z^k all have modulus > 1 + margin iff the reciprocal
// polynomial z^d - sum coeffs[k] z^(d-k), rescaled by (1 + margin), has all
// roots strictly inside the unit disk; that is decided by the reflection
// coefficients staying below one in magnitude.
bool ar_is_stationary(std::span<const double> coeffs, double margin) {
  const int d = static_cast<int>(coeffs.size());
  if (d == 0) return true;
  const double r = 1.0 + margin;
  // Monic a(z) = z^d + a[1] z^(d-1) + ... + a[d], a[k] = -coeffs[k-1] * r^k.
  std::vector<double> a(static_cast<std::size_t>(d) + 1);
  a[0] = 1.0;
  double rk = 1.0;
  for (int k = 1; k <= d; ++k) {
    rk *= r;
    a[static_cast<std::size_t>(k)] = -coeffs[static_cast<std::size_t>(k - 1)] * rk;
  }
  for (int n = d; n >= 1; --n) {
    const double k = a[static_cast<std::size_t>(n)];
    if (std::abs(k) >= 1.0) return false;
    const double denom = 1.0 - k * k;
    std::vector<double> next(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      next[static_cast<std::size_t>(i)] =
          (a[static_cast<std::size_t>(i)] - k * a[static_cast<std::size_t>(n - i)]) / denom;
    }
    a = std::move(next);
  }
  return true;
}

StreamSpec StreamSpec::regression(RegressionModel model) {
  StreamSpec s(Kind::Regression);
  s.regression_ = std::move(model);
  return s;
}

StreamSpec StreamSpec::classif_mixture(MixtureModel model) {
  StreamSpec s(Kind::ClassifMixture);
  s.mixture_ = model;
  return s;
}

StreamSpec StreamSpec::testing_mixture(MixtureModel model) {
  StreamSpec s(Kind::TestingMixture);
  s.mixture_ = model;
  return s;
}

StreamSpec StreamSpec::ar_process(ArModel model) {
  require(!model.coeffs.empty(), "StreamSpec::ar_process: empty coefficient vector");
  require(model.burn_in >= 0, "StreamSpec::ar_process: negative burn-in");
  if (!ar_is_stationary(model.coeffs)) {
    throw std::runtime_error("StreamSpec::ar_process: nonstationary parameters");
  }
  StreamSpec s(Kind::Ar);
  s.ar_ = std::move(model);
  return s;
}

int StreamSpec::covariate_dim() const {
  switch (kind_) {
    case Kind::Regression: return regression_.dim;
    case Kind::ClassifMixture:
    case Kind::TestingMixture: return 2;
    case Kind::Ar: return static_cast<int>(ar_.coeffs.size());
  }
  return 0;
}

StreamSampler::StreamSampler(StreamSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), rng_(seed) {
  if (spec_.kind() == StreamSpec::Kind::Ar) {
    const auto& model = spec_.ar_model();
    const int d = static_cast<int>(model.coeffs.size());
    ar_lags_.assign(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < model.burn_in; ++i) {
      double y = rng_.normal();
      for (int k = 0; k < d; ++k) y += model.coeffs[static_cast<std::size_t>(k)] * ar_lags_[static_cast<std::size_t>(k)];
      for (int k = d - 1; k > 0; --k) ar_lags_[static_cast<std::size_t>(k)] = ar_lags_[static_cast<std::size_t>(k - 1)];
      ar_lags_[0] = y;
    }
  }
}

Observation StreamSampler::next() {
  Observation ob;
  switch (spec_.kind()) {
    case StreamSpec::Kind::Regression: {
      const auto& model = spec_.regression_model();
      ob.x.resize(static_cast<std::size_t>(model.dim));
      for (double& v : ob.x) v = rng_.uniform01();
      ob.y = model.mean(ob.x) + model.sd(ob.x) * rng_.normal();
      break;
    }
    case StreamSpec::Kind::ClassifMixture:
    case StreamSpec::Kind::TestingMixture: {
      const auto& model = spec_.mixture_model();
      const int label = rng_.uniform01() < model.p_alt ? 1 : 0;
      const auto& center = label == 1 ? model.alt_mean : model.null_mean;
      ob.x = {center[0] + rng_.normal(), center[1] + rng_.normal()};
      ob.y = static_cast<double>(label);
      break;
    }
    case StreamSpec::Kind::Ar: {
      const auto& model = spec_.ar_model();
      const int d = static_cast<int>(model.coeffs.size());
      ob.x = ar_lags_;
      double y = rng_.normal();
      for (int k = 0; k < d; ++k) y += model.coeffs[static_cast<std::size_t>(k)] * ar_lags_[static_cast<std::size_t>(k)];
      ob.y = y;
      for (int k = d - 1; k > 0; --k) ar_lags_[static_cast<std::size_t>(k)] = ar_lags_[static_cast<std::size_t>(k - 1)];
      ar_lags_[0] = y;
      break;
    }
  }
  return ob;
}

std::vector<Observation> StreamSampler::take(int n) {
  require(n >= 0, "StreamSampler::take: negative count");
  std::vector<Observation> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(next());
  return out;
}

double adversarial_outcome(const PredictionSet& set, int num_labels) {
  switch (set.kind()) {
    case PredictionSet::Kind::Empty: return 0.0;  // anything errs
    case PredictionSet::Kind::Full: return 0.0;   // nothing errs; value irrelevant
    case PredictionSet::Kind::Point: return set.lower() + 1.0;
    case PredictionSet::Kind::Interval: return set.upper() + 1.0;
    case PredictionSet::Kind::LowerRay:
      // a ray anchored at +inf holds nothing finite; any finite y errs
      return std::isfinite(set.lower()) ? set.lower() - 1.0 : 0.0;
    case PredictionSet::Kind::Label:
      return static_cast<double>((set.label_value() + 1) % num_labels);
  }
  return 0.0;
}

}  // namespace selcon
