#include <doctest.h>

#include <cmath>
#include <set>

#include "chtest/errors.hpp"
#include "chtest/hypothesis.hpp"
#include "chtest/numeric.hpp"
#include "chtest/observe.hpp"
#include "chtest/rng.hpp"
#include "oracles.hpp"

using namespace chtest;

namespace {
Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("enumerate_hypotheses basics") {
  SUBCASE("n=3 k=1 gives the singletons") {
    const auto hs = enumerate_hypotheses(3, 1);
    REQUIRE(hs.size() == 3);
    CHECK(hs[0].support == std::vector<int>{0});
    CHECK(hs[1].support == std::vector<int>{1});
    CHECK(hs[2].support == std::vector<int>{2});
  }
  SUBCASE("n=4 k=2 is lexicographic") {
    const auto hs = enumerate_hypotheses(4, 2);
    REQUIRE(hs.size() == 6);
    CHECK(hs.front().support == std::vector<int>{0, 1});
    CHECK(hs.back().support == std::vector<int>{2, 3});
  }
  SUBCASE("n=7 k=1 matches the seven hypotheses") {
    const auto hs = enumerate_hypotheses(7, 1);
    REQUIRE(hs.size() == 7);
    for (int i = 0; i < 7; ++i) CHECK(hs[i].support == std::vector<int>{i});
  }
  SUBCASE("cap exceeded names the count") {
    CHECK_THROWS_AS(enumerate_hypotheses(60, 12, 1000), CombinatorialOverflow);
    try {
      enumerate_hypotheses(10, 3, 100);
    } catch (const CombinatorialOverflow& e) {
      CHECK(std::string(e.what()).find("120") != std::string::npos);
    }
  }
  SUBCASE("counts equal C(n,k) for n <= 20, k <= 4") {
    for (int n = 2; n <= 20; ++n) {
      for (int k = 1; k <= 4 && k < n; ++k) {
        CHECK(enumerate_hypotheses(n, k).size() == binomial_capped(n, k, 1'000'000));
      }
    }
  }
}

TEST_CASE("hypothesis_moments places the abnormal component on the support") {
  SUBCASE("Example-1 layout") {
    const HypothesisSpace space{2, 1, {3.0, 0.25}, {7.0, 0.25}};  // f1 = N(B, s), f2 = N(A, s)
    const auto joint = hypothesis_moments(space, Hypothesis{{0}});
    CHECK(joint.mean(0) == 7.0);
    CHECK(joint.mean(1) == 3.0);
    CHECK(joint.cov(0, 0) == 0.25);
    CHECK(joint.cov(1, 1) == 0.25);
    CHECK(joint.cov(0, 1) == 0.0);
  }
  SUBCASE("variance anomaly on the last coordinate") {
    const HypothesisSpace space{7, 1, {0.0, 1.0}, {0.0, 100.0}};
    const auto joint = hypothesis_moments(space, Hypothesis{{6}});
    for (int i = 0; i < 6; ++i) CHECK(joint.cov(i, i) == 1.0);
    CHECK(joint.cov(6, 6) == 100.0);
  }
  SUBCASE("empty support is rejected") {
    const HypothesisSpace space{3, 1, {0.0, 1.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(hypothesis_moments(space, Hypothesis{{}}), ConfigError);
  }
}

TEST_CASE("space invariants") {
  CHECK_THROWS_AS((HypothesisSpace{3, 0, {0, 1}, {1, 1}}.validate()), ConfigError);
  CHECK_THROWS_AS((HypothesisSpace{3, 3, {0, 1}, {1, 1}}.validate()), ConfigError);
  CHECK_THROWS_AS((HypothesisSpace{3, 1, {0, 1}, {0, 1}}.validate()), ConfigError);
  CHECK_NOTHROW((HypothesisSpace{3, 1, {0, 1}, {0, 1 + 1e-9}}.validate()));
}

TEST_CASE("project") {
  const Gaussian joint = Gaussian::diagonal(vec2(5.0, 3.0), vec2(0.25, 0.25));
  SUBCASE("coordinate projection") {
    const auto p = project(vec2(1.0, 0.0), joint);
    CHECK(p.mean == 5.0);
    CHECK(p.var == 0.25);
  }
  SUBCASE("difference direction") {
    const double s = 1.0 / std::sqrt(2.0);
    const auto p = project(vec2(s, -s), joint);
    CHECK(p.mean == doctest::Approx((5.0 - 3.0) * s).epsilon(1e-14));
    CHECK(p.var == doctest::Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("summing vector doubles the variance") {
    const auto p = project(vec2(1.0, 1.0), joint);
    CHECK(p.mean == doctest::Approx(8.0));
    CHECK(p.var == doctest::Approx(0.5));
  }
  SUBCASE("zero vector is degenerate") {
    CHECK_THROWS_AS(project(vec2(0.0, 0.0), joint), DegenerateProjection);
  }
}

TEST_CASE("gaussian validation") {
  Gaussian g;
  g.mean = vec2(0.0, 0.0);
  g.cov = Eigen::MatrixXd(2, 2);
  SUBCASE("asymmetric covariance rejected") {
    g.cov << 1.0, 0.5, -0.5, 1.0;
    CHECK_THROWS_AS(g.validate(), ConfigError);
  }
  SUBCASE("indefinite covariance rejected") {
    g.cov << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(g.validate(), ConfigError);
  }
  SUBCASE("PSD accepted") {
    g.cov << 1.0, 0.5, 0.5, 1.0;
    CHECK_NOTHROW(g.validate());
  }
}

TEST_CASE("sample_trial determinism and strategy semantics") {
  const HypothesisSpace space{4, 1, {0.0, 1.0}, {5.0, 2.0}};
  const Hypothesis truth{{2}};
  Eigen::VectorXd a = Eigen::VectorXd::Zero(4);
  a(0) = 1.0;
  const auto strategy = SensingStrategy::fixed(a);

  SUBCASE("m = 0 rejected") {
    CHECK_THROWS_AS(sample_trial(space, truth, strategy, 0, 1), ConfigError);
  }
  SUBCASE("fixed strategy repeats its vector") {
    const auto obs = sample_trial(space, truth, strategy, 5, 7);
    for (const auto& r : obs.records) CHECK(r.vector == a);
  }
  SUBCASE("same seed, same bytes") {
    const auto obs1 = sample_trial(space, truth, strategy, 8, 42);
    const auto obs2 = sample_trial(space, truth, strategy, 8, 42);
    for (int j = 0; j < 8; ++j) CHECK(obs1.records[j].value == obs2.records[j].value);
  }
  SUBCASE("different seeds differ at the first record") {
    int differing = 0;
    for (std::uint64_t s = 0; s < 64; ++s) {
      const auto obs1 = sample_trial(space, truth, strategy, 1, s);
      const auto obs2 = sample_trial(space, truth, strategy, 1, s + 1000);
      if (obs1.records[0].value != obs2.records[0].value) ++differing;
    }
    CHECK(differing == 64);
  }
}

TEST_CASE("sampled moments match the projected distribution") {
  const HypothesisSpace space{3, 1, {1.0, 2.0}, {-2.0, 5.0}};
  const Hypothesis truth{{1}};
  Eigen::VectorXd a(3);
  a << 0.5, -1.5, 2.0;
  const auto strategy = SensingStrategy::fixed(a);

  const auto joint = hypothesis_moments(space, truth);
  const auto projected = project(a, joint);

  const int samples = 200'000;
  const auto obs = sample_trial(space, truth, strategy, samples, 2024);
  double sum = 0.0, sum2 = 0.0;
  for (const auto& r : obs.records) {
    sum += r.value;
    sum2 += r.value * r.value;
  }
  const double mean = sum / samples;
  const double var = sum2 / samples - mean * mean;

  const double mean_se = std::sqrt(projected.var / samples);
  const double var_se = projected.var * std::sqrt(2.0 / samples);
  CHECK(std::abs(mean - projected.mean) < 5.0 * mean_se);
  CHECK(std::abs(var - projected.var) < 5.0 * var_se);
}

TEST_CASE("random strategy draws from the ensemble by weight") {
  SensingEnsemble e;
  e.vectors = {vec2(1.0, 0.0), vec2(0.0, 1.0)};
  e.probabilities = {0.25, 0.75};
  const auto strategy = SensingStrategy::random(e);
  const HypothesisSpace space{2, 1, {0.0, 1.0}, {1.0, 1.0}};
  const auto obs = sample_trial(space, Hypothesis{{0}}, strategy, 40'000, 99);
  int first = 0;
  for (const auto& r : obs.records) {
    if (r.vector(0) == 1.0) ++first;
  }
  CHECK(std::abs(first / 40'000.0 - 0.25) < 5.0 * std::sqrt(0.25 * 0.75 / 40'000.0));
}

TEST_CASE("schedule ensembles collapse duplicates with frequencies") {
  std::vector<Eigen::VectorXd> rows = {vec2(1, 0), vec2(0, 1), vec2(1, 0)};
  const auto ensemble = SensingStrategy::schedule(rows).as_ensemble();
  REQUIRE(ensemble.vectors.size() == 2);
  CHECK(ensemble.probabilities[0] == doctest::Approx(2.0 / 3.0));
  CHECK(ensemble.probabilities[1] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("ensemble invariants") {
  SensingEnsemble e;
  e.vectors = {vec2(1, 0)};
  e.probabilities = {0.5};
  CHECK_THROWS_AS(e.validate(), ConfigError);  // does not sum to 1
  e.probabilities = {1.0};
  CHECK_NOTHROW(e.validate());
}
