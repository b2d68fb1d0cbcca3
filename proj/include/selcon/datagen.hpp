#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "selcon/prediction_set.hpp"
#include "selcon/rng.hpp"

// Reproducible synthetic streams: the iid regression model, two bivariate
// Gaussian mixtures (classification and testing), and a stationary AR(d)
// process. A given seed yields a bit-identical stream.

namespace selcon {

struct Observation {
  std::vector<double> x;
  double y = 0.0;
};

// y = mean(x) + sd(x) * standard normal, with x uniform on [0,1]^dim.
// Defaults: mean(x) = 2*x1, sd = 1, dim = 2.
struct RegressionModel {
  int dim = 2;
  std::function<double(std::span<const double>)> mean;
  std::function<double(std::span<const double>)> sd;

  static RegressionModel default_instance();
};

// Two-component bivariate Gaussian mixture with identity covariances:
// y ~ Bernoulli(p_alt), x ~ N(mean_y, I_2).
struct MixtureModel {
  double p_alt = 0.5;
  std::array<double, 2> null_mean = {0.0, 0.0};
  std::array<double, 2> alt_mean = {1.0, 1.0};

  static MixtureModel classification();  // p 0.5, centers (0,0) and (1,1)
  static MixtureModel testing();         // p 0.2, centers (0,0) and (3,3)
};

// Centered AR(d) with standard normal innovations, started from zero state
// and warmed up for burn_in draws. Construction rejects parameter vectors
// whose characteristic polynomial has a root of modulus <= 1 + 1e-6.
struct ArModel {
  std::vector<double> coeffs;
  int burn_in = 1000;
};

// True whether every root of 1 - sum_k coeffs[k] z^k has modulus strictly
// greater than 1 + margin.
bool ar_is_stationary(std::span<const double> coeffs, double margin = 1e-6);

class StreamSpec {
 public:
  enum class Kind { Regression, ClassifMixture, TestingMixture, Ar };

  static StreamSpec regression(RegressionModel model = RegressionModel::default_instance());
  static StreamSpec classif_mixture(MixtureModel model = MixtureModel::classification());
  static StreamSpec testing_mixture(MixtureModel model = MixtureModel::testing());
  static StreamSpec ar_process(ArModel model);  // throws on nonstationary coeffs

  Kind kind() const { return kind_; }
  const RegressionModel& regression_model() const { return regression_; }
  const MixtureModel& mixture_model() const { return mixture_; }
  const ArModel& ar_model() const { return ar_; }
  int covariate_dim() const;

 private:
  explicit StreamSpec(Kind kind) : kind_(kind) {}

  Kind kind_;
  RegressionModel regression_;
  MixtureModel mixture_;
  ArModel ar_;
};

class StreamSampler {
 public:
  StreamSampler(StreamSpec spec, std::uint64_t seed);

  Observation next();
  std::vector<Observation> take(int n);

  const StreamSpec& spec() const { return spec_; }

 private:
  StreamSpec spec_;
  Rng rng_;
  std::vector<double> ar_lags_;  // most recent value first
};

// An outcome guaranteed to fall outside the given set whenever its complement
// is nonempty; num_labels bounds the label alphabet for label sets.
double adversarial_outcome(const PredictionSet& set, int num_labels);

}  // namespace selcon
