#include <doctest.h>

#include <cmath>
#include <vector>

#include "selcon/rng.hpp"
#include "selcon/rules.hpp"

using namespace selcon;

TEST_CASE("regression interval forms") {
  // +/- PhiInv(0.95) at q = 0.9, B = 1
  const PredictionSet mid = regression_interval(0.0, 1.0, 0.9, 1.0);
  CHECK(mid.kind() == PredictionSet::Kind::Interval);
  CHECK(mid.lower() == doctest::Approx(-1.6448536269514722).epsilon(1e-8));
  CHECK(mid.upper() == doctest::Approx(1.6448536269514722).epsilon(1e-8));

  const PredictionSet pt = regression_interval(2.5, 1.0, -0.2, 1.0);
  CHECK(pt.kind() == PredictionSet::Kind::Point);
  CHECK(pt.contains(2.5));
  CHECK(!pt.contains(2.4999));

  const PredictionSet all = regression_interval(0.0, 1.0, 1.2, 1.0);
  CHECK(all.kind() == PredictionSet::Kind::Full);
  CHECK(all.contains(1e12));

  CHECK_THROWS_AS(regression_interval(0.0, 0.0, 0.5, 1.0), contract_violation);
  CHECK_THROWS_AS(regression_interval(0.0, -1.0, 0.5, 1.0), contract_violation);
}

TEST_CASE("interval length is nondecreasing in q") {
  double prev = 0.0;
  for (double q = 0.01; q < 1.0; q += 0.01) {
    const double len = regression_interval(0.3, 1.7, q, 1.0).length();
    CHECK(len >= prev);
    prev = len;
  }
}

TEST_CASE("classify point") {
  const std::vector<double> unique_max = {0.2, 0.5, 0.3};
  CHECK(classify_point(unique_max) == 1);

  const std::vector<double> tie = {0.5, 0.5};
  CHECK(classify_point(tie) == 0);

  const std::vector<double> degenerate = {1.0, 0.0};
  CHECK(classify_point(degenerate) == 0);

  CHECK_THROWS_AS(classify_point(std::vector<double>{}), contract_violation);
  CHECK_THROWS_AS(classify_point(std::vector<double>{0.4, 0.4}), contract_violation);
}

TEST_CASE("argmax is invariant under increasing transforms") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> post(2 + static_cast<std::size_t>(rng.uniform01() * 4));
    double total = 0.0;
    for (double& p : post) {
      p = 0.01 + rng.uniform01();
      total += p;
    }
    for (double& p : post) p /= total;
    const int before = argmax_label(post);
    // Strictly increasing transform, renormalized.
    std::vector<double> mapped(post.size());
    double mapped_total = 0.0;
    for (std::size_t k = 0; k < post.size(); ++k) {
      mapped[k] = std::exp(3.0 * post[k]) - 0.5;
      mapped_total += mapped[k];
    }
    for (double& p : mapped) p /= mapped_total;
    CHECK(argmax_label(mapped) == before);
  }
}

TEST_CASE("selection rules") {
  const std::vector<double> x = {0.4, 0.6};

  CHECK(informative_select(0.7, 0.6));
  CHECK(!informative_select(0.7, 0.7));  // strict
  CHECK(informative_select(0.0, -0.1));  // always selects below zero
  CHECK(!adaptive_mean_select(1.9, 2.0));
  CHECK(adaptive_mean_select(2.0, 2.0));

  CHECK(select(SelectionRule::all(), x, 0.5, 0.0));
  const auto region = SelectionRule::region(
      [](std::span<const double> v) { return v[0] <= 0.3; });
  CHECK(!select(region, x, 0.5, 0.0));
  CHECK(select(SelectionRule::adaptive_mean(0.2), x, 0.5, 0.3));
  CHECK(!select(SelectionRule::informative(), x, 0.7, 0.7));
}

TEST_CASE("informative selection is monotone in q") {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const double w = rng.uniform01();
    const double q = rng.uniform01();
    const double q_higher = q + rng.uniform01() * (1.0 - q);
    if (!informative_select(w, q)) {
      CHECK(!informative_select(w, q_higher));
    }
  }
}

TEST_CASE("error conventions") {
  CHECK(coverage_error(3.0, PredictionSet::interval(1.0, 5.0)) == 0.0);
  CHECK(coverage_error(3.0, PredictionSet::empty()) == 1.0);
  CHECK(coverage_error(-1e9, PredictionSet::full()) == 0.0);
  CHECK(coverage_error(2.0, PredictionSet::lower_ray(2.0)) == 0.0);
  CHECK(coverage_error(1.999, PredictionSet::lower_ray(2.0)) == 1.0);

  CHECK(label_coverage_error(1, PredictionSet::label(1)) == 0.0);
  CHECK(label_coverage_error(0, PredictionSet::label(1)) == 1.0);
  CHECK(label_coverage_error(7, PredictionSet::full()) == 0.0);
  CHECK(label_coverage_error(7, PredictionSet::empty()) == 1.0);

  const std::vector<double> weights = {0.25, 0.75};
  CHECK(weighted_label_error(1, PredictionSet::label(0), weights) == 0.75);
  CHECK(weighted_label_error(0, PredictionSet::label(0), weights) == 0.0);
  CHECK(weighted_label_error(1, PredictionSet::full(), weights) == 0.0);

  CHECK(testing_error(0) == 1.0);
  CHECK(testing_error(1) == 0.0);
  CHECK_THROWS_AS(testing_error(2), contract_violation);
}

TEST_CASE("testing error over a sequence") {
  const int ys[] = {0, 1, 1};
  const double expected[] = {1.0, 0.0, 0.0};
  for (int i = 0; i < 3; ++i) CHECK(testing_error(ys[i]) == expected[i]);
}
