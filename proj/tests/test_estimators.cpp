#include <doctest.h>

#include <cmath>
#include <vector>

#include "selcon/datagen.hpp"
#include "selcon/estimators.hpp"
#include "selcon/normal.hpp"
#include "selcon/rng.hpp"
#include "selcon/rules.hpp"

using namespace selcon;

TEST_CASE("gaussian nb incremental moments") {
  GaussianNb model(2, 2);
  model.update(std::vector<double>{1.0, 2.0}, 0);
  CHECK(model.count(0) == 1);
  CHECK(model.mean(0, 0) == doctest::Approx(1.0));
  CHECK(model.mean(0, 1) == doctest::Approx(2.0));
  CHECK(model.variance(0, 0) == doctest::Approx(1e-6));  // floor with one point

  GaussianNb two(2, 1);
  two.update(std::vector<double>{0.0}, 0);
  two.update(std::vector<double>{2.0}, 0);
  CHECK(two.mean(0, 0) == doctest::Approx(1.0));
  CHECK(two.variance(0, 0) == doctest::Approx(2.0));  // sample variance

  GaussianNb priors(2, 1);
  priors.update(std::vector<double>{0.5}, 1);
  priors.update(std::vector<double>{0.7}, 1);
  CHECK(priors.count(1) == 2);
  CHECK(priors.count(0) == 0);
  CHECK_THROWS_WITH_AS(priors.posterior(std::vector<double>{0.0}),
                       "GaussianNb: untrained class", std::runtime_error);

  CHECK_THROWS_AS(model.update(std::vector<double>{1.0}, 0), contract_violation);
  CHECK_THROWS_AS(model.update(std::vector<double>{1.0, 2.0}, 5), contract_violation);
}

TEST_CASE("gaussian nb posterior") {
  // Symmetric model: equal priors, means +/-1, equal variances.
  GaussianNb sym(2, 1);
  sym.update(std::vector<double>{-1.5}, 0);
  sym.update(std::vector<double>{-0.5}, 0);
  sym.update(std::vector<double>{0.5}, 1);
  sym.update(std::vector<double>{1.5}, 1);
  const auto post = sym.posterior(std::vector<double>{0.0});
  CHECK(post[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(post[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(post[0] + post[1] == doctest::Approx(1.0).epsilon(1e-12));

  // Equal likelihoods cancel: posterior equals the count priors (0.8, 0.2).
  // A large variance floor forces both classes onto the same Gaussian.
  GaussianNb counts(2, 1, 5.0);
  counts.update(std::vector<double>{-1.0}, 0);
  counts.update(std::vector<double>{1.0}, 0);
  counts.update(std::vector<double>{-1.0}, 0);
  counts.update(std::vector<double>{1.0}, 0);
  counts.update(std::vector<double>{0.0}, 1);
  const auto prior_post = counts.posterior(std::vector<double>{0.3});
  CHECK(prior_post[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(prior_post[1] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("gaussian nb separates distant classes") {
  // x at the class-0 mean with tiny shared variance: posterior(0) -> 1.
  // Expected value verified against the direct density-ratio formula.
  GaussianNb model(2, 1);
  model.update(std::vector<double>{-0.001}, 0);
  model.update(std::vector<double>{0.001}, 0);
  model.update(std::vector<double>{0.999}, 1);
  model.update(std::vector<double>{1.001}, 1);
  const auto post = model.posterior(std::vector<double>{0.0});

  const double var = 2e-6;  // sample variance of {+-0.001}
  const double log_ratio = (-0.5 * 1.0 / var) - (-0.5 * 0.0 / var);
  const double expected0 = 1.0 / (1.0 + std::exp(log_ratio));
  CHECK(post[0] == doctest::Approx(expected0).epsilon(1e-9));
  CHECK(post[0] > 1.0 - 1e-6);
}

TEST_CASE("gaussian nb posterior sums to one") {
  Rng rng(5);
  GaussianNb model(3, 2, 1e-6);
  for (int i = 0; i < 60; ++i) {
    model.update(std::vector<double>{rng.normal(), rng.normal()},
                 static_cast<int>(rng.uniform01() * 3));
  }
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> x = {4.0 * rng.normal(), 4.0 * rng.normal()};
    const auto post = model.posterior(x);
    double total = 0.0;
    for (double p : post) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("kernel regressor basics") {
  KernelRegressor empty(2);
  const auto fallback = empty.predict(std::vector<double>{0.1, 0.2});
  CHECK(fallback.mu == 0.0);
  CHECK(fallback.sigma == 1.0);

  KernelRegressor constant(1);
  for (int i = 0; i < 20; ++i) {
    constant.add(std::vector<double>{i * 0.05}, 3.7);
  }
  CHECK(constant.predict(std::vector<double>{0.5}).mu == doctest::Approx(3.7));
  CHECK(constant.predict(std::vector<double>{-4.0}).mu == doctest::Approx(3.7));

  KernelRegressor single(1);
  single.add(std::vector<double>{0.3}, 1.25);
  const auto pred = single.predict(std::vector<double>{0.3});
  CHECK(pred.mu == doctest::Approx(1.25));
  CHECK(pred.sigma == doctest::Approx(1e-3));
}

TEST_CASE("kernel regressor with huge bandwidth reproduces the sample mean") {
  Rng rng(17);
  KernelRegressor flat(1, 1e9);
  double sum = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double y = rng.normal();
    flat.add(std::vector<double>{rng.uniform01()}, y);
    sum += y;
  }
  const auto pred = flat.predict(std::vector<double>{0.77});
  CHECK(pred.mu == doctest::Approx(sum / 50.0).epsilon(1e-9));
}

TEST_CASE("ar fit exact recurrence") {
  std::vector<double> history;
  double y = 1.0;
  for (int i = 0; i < 40; ++i) {
    history.push_back(y);
    y *= 0.5;
  }
  const auto phi = ar_fit(history, 1, 0.0);
  CHECK(phi[0] == doctest::Approx(0.5).epsilon(1e-12));

  const std::vector<double> zeros(50, 0.0);
  const auto ridge_phi = ar_fit(zeros, 1, 0.5);
  CHECK(ridge_phi[0] == 0.0);

  CHECK_THROWS_WITH_AS(ar_fit(zeros, 1, 0.0), "ArEstimator: singular design",
                       std::runtime_error);
  CHECK_THROWS_AS(ar_fit(std::vector<double>{1.0}, 1, 0.0), contract_violation);
}

TEST_CASE("ar fit recovers simulated coefficients") {
  // Consistency run against the stream generator: AR(2) with phi = (0.4, 0.2).
  const StreamSpec spec = StreamSpec::ar_process({{0.4, 0.2}, 1000});
  StreamSampler sampler(spec, 99);
  std::vector<double> history;
  history.reserve(100000);
  for (int i = 0; i < 100000; ++i) history.push_back(sampler.next().y);
  const auto phi = ar_fit(history, 2, 1e-6);
  CHECK(phi[0] == doctest::Approx(0.4).epsilon(0.05));
  CHECK(std::abs(phi[0] - 0.4) <= 0.02);
  CHECK(std::abs(phi[1] - 0.2) <= 0.02);
}

TEST_CASE("ar fit gradient vanishes at the solution") {
  const StreamSpec spec = StreamSpec::ar_process({{0.5}, 200});
  StreamSampler sampler(spec, 4);
  std::vector<double> history;
  for (int i = 0; i < 2000; ++i) history.push_back(sampler.next().y);
  const auto phi = ar_fit(history, 1, 0.0);
  // gradient of sum (y_t - phi y_{t-1})^2 at the minimizer
  double grad = 0.0;
  for (std::size_t t = 1; t < history.size(); ++t) {
    grad += -2.0 * history[t - 1] * (history[t] - phi[0] * history[t - 1]);
  }
  CHECK(std::abs(grad) <= 1e-8 * static_cast<double>(history.size()));
}

TEST_CASE("adaptive residual score") {
  CHECK(adaptive_residual_score(2.0, 1.0, 2.0, 1.0) == doctest::Approx(0.0));
  CHECK(adaptive_residual_score(0.0, 1.0, 1.6448536269514722, 1.0) ==
        doctest::Approx(0.9).epsilon(1e-9));
  CHECK(adaptive_residual_score(0.0, 1.0, 1e9, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(adaptive_residual_score(0.0, 0.0, 1.0, 1.0), contract_violation);
}

TEST_CASE("score is increasing in the residual and stays in (0,B)") {
  double prev = -1.0;
  for (double r = 0.0; r < 6.0; r += 0.05) {
    const double v = adaptive_residual_score(0.0, 2.0, 2.0 * r, 3.0);
    CHECK(v >= prev);
    CHECK(v >= 0.0);
    CHECK(v <= 3.0);
    prev = v;
  }
}

TEST_CASE("score and interval agree as sublevel set") {
  // y in C(x,q) iff score(y) <= q, on a grid away from exact boundaries.
  const double mu = 0.4;
  const double sigma = 1.3;
  const double B = 1.0;
  for (double q = 0.05; q < B; q += 0.1) {
    const PredictionSet set = regression_interval(mu, sigma, q, B);
    for (double y = mu - 5.0; y <= mu + 5.0; y += 0.0917) {
      const double score = adaptive_residual_score(mu, sigma, y, B);
      if (score <= q - 1e-9) CHECK(set.contains(y));
      if (score >= q + 1e-9) CHECK(!set.contains(y));
    }
  }
}
