#include <doctest.h>

#include <cmath>

#include "chtest/chernoff.hpp"
#include "chtest/design.hpp"
#include "chtest/errors.hpp"
#include "chtest/rng.hpp"
#include "oracles.hpp"

using namespace chtest;

namespace {

SensingEnsemble single_atom(const Eigen::VectorXd& v) {
  SensingEnsemble e;
  e.vectors = {v};
  e.probabilities = {1.0};
  return e;
}

Eigen::VectorXd coordinate(int n, int i) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v(i) = 1.0;
  return v;
}

/// Small random ensembles for the balance / ordering properties.
struct RandomPairCase {
  SensingEnsemble ensemble;
  HypothesisSpace space;
  Hypothesis hv, hw;
};

RandomPairCase random_pair_case(Rng& rng) {
  RandomPairCase c;
  const int n = 2 + static_cast<int>(rng.uniform_below(5));  // 2..6
  c.space.n = n;
  c.space.k = 1;
  c.space.f1 = {2.0 * rng.uniform01() - 1.0, 0.4 + 2.0 * rng.uniform01()};
  c.space.f2 = {c.space.f1.mean + 0.5 + 2.5 * rng.uniform01(), 0.4 + 5.0 * rng.uniform01()};
  c.hv.support = {0};
  c.hw.support = {1};
  const int atoms = 1 + static_cast<int>(rng.uniform_below(4));
  double total = 0.0;
  for (int a = 0; a < atoms; ++a) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.normal();
    if (v.norm() < 0.1) v(0) += 1.0;
    c.ensemble.vectors.push_back(v);
    const double w = 0.1 + rng.uniform01();
    c.ensemble.probabilities.push_back(w);
    total += w;
  }
  for (double& p : c.ensemble.probabilities) p /= total;
  // Repair the last weight so the sum is exactly 1 within tolerance.
  double sum = 0.0;
  for (double p : c.ensemble.probabilities) sum += p;
  c.ensemble.probabilities.back() += 1.0 - sum;
  return c;
}

}  // namespace

TEST_CASE("lambda divergence endpoints and frozen values") {
  const ScalarGaussian p{0.0, 1.0};
  SUBCASE("zero at the endpoints") {
    const ScalarGaussian q{3.0, 2.0};
    CHECK(lambda_divergence_gaussian(p, q, 0.0) == 0.0);
    CHECK(lambda_divergence_gaussian(p, q, 1.0) == 0.0);
  }
  SUBCASE("mean-separated pair at the midpoint") {
    CHECK(lambda_divergence_gaussian(p, {8.0, 1.0}, 0.5) == doctest::Approx(8.0).epsilon(1e-12));
  }
  SUBCASE("variance-separated pair at the midpoint") {
    const double expected = 0.5 * std::log(50.5 / 10.0);
    CHECK(lambda_divergence_gaussian(p, {0.0, 100.0}, 0.5) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("matches quadrature away from the midpoint") {
    const ScalarGaussian q{2.5, 7.0};
    for (double lambda : {0.15, 0.4, 0.85}) {
      CHECK(lambda_divergence_gaussian(p, q, lambda) ==
            doctest::Approx(oracle::numeric_lambda_divergence(p, q, lambda)).epsilon(1e-9));
    }
  }
  SUBCASE("domain errors") {
    CHECK_THROWS_AS(lambda_divergence_gaussian(p, {0.0, 0.0}, 0.5), NumericError);
    CHECK_THROWS_AS(lambda_divergence_gaussian(p, {0.0, 1.0}, 1.5), ConfigError);
  }
}

TEST_CASE("chernoff closed form") {
  SUBCASE("equal-variance pair: (A-B)^2 / (8 s^2) at lambda 1/2") {
    const auto r = chernoff({0.0, 1.0}, {8.0, 1.0});
    CHECK(r.value == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(r.lambda_star == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(r.method == DivergenceMethod::closed_form);
  }
  SUBCASE("identical distributions give zero") {
    const auto r = chernoff({1.0, 2.0}, {1.0, 2.0});
    CHECK(r.value == 0.0);
  }
  SUBCASE("variance pair matches the variance-ratio closed forms") {
    const auto r = chernoff({0.0, 1.0}, {0.0, 100.0});
    CHECK(r.value == doctest::Approx(1.0572285474461127).epsilon(1e-9));
    CHECK(r.lambda_star == doctest::Approx(0.7929537691493842).epsilon(1e-6));
  }
  SUBCASE("closed form tracks the quadrature oracle on random pairs") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
      const ScalarGaussian p{4.0 * rng.uniform01() - 2.0, 0.3 + 3.0 * rng.uniform01()};
      const ScalarGaussian q{4.0 * rng.uniform01() - 2.0, 0.3 + 3.0 * rng.uniform01()};
      const double closed = chernoff(p, q).value;
      const double numeric = oracle::numeric_chernoff(p, q);
      CHECK(closed == doctest::Approx(numeric).epsilon(1e-6));
    }
  }
  SUBCASE("no lambda grid point beats the reported maximum") {
    Rng rng(11);
    for (int i = 0; i < 20; ++i) {
      const ScalarGaussian p{rng.normal(), 0.5 + rng.uniform01()};
      const ScalarGaussian q{rng.normal(), 0.5 + 4.0 * rng.uniform01()};
      const auto r = chernoff(p, q);
      for (int gi = 0; gi <= 100; ++gi) {
        CHECK(lambda_divergence_gaussian(p, q, gi / 100.0) <= r.value + 1e-9);
      }
    }
  }
}

TEST_CASE("generic-density route agrees with the closed form") {
  Rng rng(13);
  for (int i = 0; i < 25; ++i) {
    const ScalarGaussian p{3.0 * rng.uniform01() - 1.5, 0.4 + 2.0 * rng.uniform01()};
    const ScalarGaussian q{3.0 * rng.uniform01() - 1.5, 0.4 + 2.0 * rng.uniform01()};
    const double sd = std::sqrt(std::max(p.var, q.var));
    const SupportHint hint{std::min(p.mean, q.mean) - 12.0 * sd,
                           std::max(p.mean, q.mean) + 12.0 * sd};
    const auto numeric = chernoff_numeric([&](double y) { return p.pdf(y); },
                                          [&](double y) { return q.pdf(y); }, hint);
    const auto closed = chernoff(p, q);
    CHECK(numeric.method == DivergenceMethod::numeric_integration);
    CHECK(numeric.value ==
          doctest::Approx(closed.value).epsilon(1e-6).scale(std::max(1.0, closed.value)));
  }
}

TEST_CASE("variance ratio closed forms") {
  SUBCASE("alpha") {
    CHECK(variance_ratio_alpha(1.0) == 0.5);
    CHECK(variance_ratio_alpha(100.0) == doctest::Approx(0.7929537691493842).epsilon(1e-12));
    CHECK(variance_ratio_alpha(std::exp(1.0)) ==
          doctest::Approx(1.0 / (std::exp(1.0) - 1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(variance_ratio_alpha(0.5), ConfigError);
  }
  SUBCASE("alpha is the argmax of the divergence") {
    for (double b : {2.0, 10.0, 100.0}) {
      const auto r = chernoff({0.0, 1.0}, {0.0, b});
      CHECK(r.lambda_star == doctest::Approx(variance_ratio_alpha(b)).epsilon(1e-6));
    }
  }
  SUBCASE("value") {
    CHECK(variance_ratio_chernoff(1.0) == 0.0);
    CHECK(variance_ratio_chernoff(100.0) == doctest::Approx(1.0572285474461127).epsilon(1e-12));
    CHECK(variance_ratio_chernoff(10.0) < variance_ratio_chernoff(100.0));
    CHECK_THROWS_AS(variance_ratio_chernoff(0.99), ConfigError);
  }
  SUBCASE("value equals the search on the divergence") {
    for (double b : {3.0, 25.0, 400.0}) {
      CHECK(variance_ratio_chernoff(b) ==
            doctest::Approx(chernoff({0.0, 1.0}, {0.0, b}).value).epsilon(1e-9));
    }
  }
}

TEST_CASE("conditional Chernoff information") {
  const HypothesisSpace space{7, 1, {0.0, 1.0}, {0.0, 100.0}};
  const Hypothesis hv{{0}}, hw{{1}};

  SUBCASE("single-atom ensembles collapse to the plain value") {
    Eigen::VectorXd a(7);
    a << 1, 0, 0, 1, 1, 0, 1;
    const auto ensemble = single_atom(a);
    const auto ic = inner_conditional_chernoff(ensemble, space, hv, hw);
    const auto oc = outer_conditional_chernoff(ensemble, space, hv, hw);
    const auto joint_v = hypothesis_moments(space, hv);
    const auto joint_w = hypothesis_moments(space, hw);
    const auto plain = chernoff(project(a, joint_v), project(a, joint_w));
    CHECK(ic.value == doctest::Approx(plain.value).epsilon(1e-12));
    CHECK(oc.value == doctest::Approx(plain.value).epsilon(1e-12));
    CHECK(ic.value == doctest::Approx(oc.value).epsilon(1e-12));
  }

  SUBCASE("zero weight on the only discriminating vector gives zero") {
    SensingEnsemble e;
    e.vectors = {coordinate(7, 0), coordinate(7, 2)};
    e.probabilities = {0.0, 1.0};
    CHECK(inner_conditional_chernoff(e, space, hv, hw).value == 0.0);
    CHECK(outer_conditional_chernoff(e, space, hv, hw).value == 0.0);
  }

  SUBCASE("all-zero vector in support is degenerate") {
    SensingEnsemble e;
    e.vectors = {Eigen::VectorXd::Zero(7)};
    e.probabilities = {1.0};
    CHECK_THROWS_AS(outer_conditional_chernoff(e, space, hv, hw), DegenerateProjection);
  }

  SUBCASE("separate-observation ensemble hits the closed form") {
    for (double s2 : {4.0, 25.0, 100.0}) {
      const HypothesisSpace sp{7, 1, {0.0, 1.0}, {0.0, s2}};
      const auto oc = outer_conditional_chernoff(separate_ensemble(7), sp, hv, hw);
      const double expected = std::log((s2 + 1.0) / (2.0 * std::sqrt(s2))) / 7.0;
      CHECK(oc.value == doctest::Approx(expected).epsilon(1e-9));
      CHECK(oc.lambda_star == doctest::Approx(0.5).epsilon(1e-6));
    }
  }

  SUBCASE("Hamming ensemble dominates separate observations for pair {0},{1}") {
    SensingEnsemble hamming;
    hamming.vectors = hamming74_rows();
    hamming.probabilities = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    const auto oc_h = outer_conditional_chernoff(hamming, space, hv, hw);
    const auto oc_s = outer_conditional_chernoff(separate_ensemble(7), space, hv, hw);
    CHECK(oc_h.value == doctest::Approx(0.32305665974239917).epsilon(1e-9));
    CHECK(oc_h.value > oc_s.value);

    // Holder bound from the per-atom Chernoff values.
    const auto ic = inner_conditional_chernoff(hamming, space, hv, hw);
    const auto joint_v = hypothesis_moments(space, hv);
    const auto joint_w = hypothesis_moments(space, hw);
    double bound = 0.0;
    for (std::size_t i = 0; i < hamming.vectors.size(); ++i) {
      const double c =
          chernoff(project(hamming.vectors[i], joint_v), project(hamming.vectors[i], joint_w))
              .value;
      bound = std::max(
          bound, -std::log(1.0 - hamming.probabilities[i] +
                           hamming.probabilities[i] * std::exp(-c)));
    }
    CHECK(ic.value >= bound - 1e-12);
    // Expectation inside the log can only lower the exponent.
    CHECK(ic.value <= oc_h.value + 1e-12);
  }
}

TEST_CASE("tilted balance") {
  SUBCASE("symmetric pair balances at one half") {
    const HypothesisSpace space{2, 1, {0.0, 1.0}, {3.0, 1.0}};
    const auto tb =
        tilted_balance(single_atom(coordinate(2, 0)), space, Hypothesis{{0}}, Hypothesis{{1}}, 0.5);
    CHECK(tb.q_vw == doctest::Approx(tb.q_wv).epsilon(1e-12));
  }
  SUBCASE("lambda at zero-plus collapses onto the second hypothesis") {
    const HypothesisSpace space{2, 1, {0.0, 1.0}, {0.0, 9.0}};
    const auto tb =
        tilted_balance(single_atom(coordinate(2, 0)), space, Hypothesis{{0}}, Hypothesis{{1}}, 1e-9);
    CHECK(tb.q_wv == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(tb.q_vw > 0.1);
  }
  SUBCASE("lambda outside (0,1) is rejected") {
    const HypothesisSpace space{2, 1, {0.0, 1.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(
        tilted_balance(single_atom(coordinate(2, 0)), space, Hypothesis{{0}}, Hypothesis{{1}}, 0.0),
        ConfigError);
  }
  SUBCASE("balances at the outer lambda_star and equals the OC value") {
    Rng rng(101);
    for (int i = 0; i < 30; ++i) {
      const auto c = random_pair_case(rng);
      const auto oc = outer_conditional_chernoff(c.ensemble, c.space, c.hv, c.hw);
      const auto tb = tilted_balance(c.ensemble, c.space, c.hv, c.hw, oc.lambda_star);
      CHECK(std::abs(tb.q_vw - tb.q_wv) <= 1e-6);
      CHECK(tb.q_vw == doctest::Approx(oc.value).epsilon(1e-6).scale(1.0));
    }
  }
  SUBCASE("closed-form KL agrees with quadrature") {
    const ScalarGaussian from{0.7, 2.0}, to{-0.4, 5.0};
    CHECK(kl_gaussian(from, to) == doctest::Approx(oracle::numeric_kl(from, to)).epsilon(1e-9));
  }
}

TEST_CASE("ordering and dominance properties on random ensembles") {
  Rng rng(55);
  for (int i = 0; i < 40; ++i) {
    const auto c = random_pair_case(rng);
    const double oc = outer_conditional_chernoff(c.ensemble, c.space, c.hv, c.hw).value;
    const double ic = inner_conditional_chernoff(c.ensemble, c.space, c.hv, c.hw).value;
    CHECK(ic <= oc + 1e-10);  // expectation inside the log is the weaker exponent
  }
}

TEST_CASE("Example-1 mixing doubles the coordinate exponent") {
  Rng rng(31);
  for (int i = 0; i < 20; ++i) {
    const double a = 4.0 * rng.uniform01() - 2.0;
    const double b = a + 0.5 + 3.0 * rng.uniform01();
    const double var = 0.5 + 3.0 * rng.uniform01();
    const HypothesisSpace space{2, 1, {b, var}, {a, var}};
    const Hypothesis hv{{0}}, hw{{1}};
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::VectorXd mix(2);
    mix << s, -s;
    const double oc_mixed =
        outer_conditional_chernoff(single_atom(mix), space, hv, hw).value;
    const double oc_coord =
        outer_conditional_chernoff(single_atom(coordinate(2, 0)), space, hv, hw).value;
    CHECK(oc_mixed == doctest::Approx(2.0 * oc_coord).epsilon(1e-12));
  }
}

TEST_CASE("min pairwise exponent") {
  SUBCASE("single pair reproduces the fixed-vector formula") {
    const double a1 = 1.3, a2 = -0.4, A = 2.0, B = -1.0, var = 0.7;
    const HypothesisSpace space{2, 1, {B, var}, {A, var}};
    Eigen::VectorXd v(2);
    v << a1, a2;
    const auto r = min_pairwise_exponent(single_atom(v), space);
    const double expected =
        (a1 - a2) * (a1 - a2) * (A - B) * (A - B) / (8.0 * (a1 * a1 + a2 * a2) * var);
    CHECK(r.exponent == doctest::Approx(expected).epsilon(1e-9));
  }
  SUBCASE("permutation-symmetric ensembles have equal pairwise exponents") {
    const int n = 5;
    const auto d = permutation_design(n, 8.0, 0.0, 1.0);
    const HypothesisSpace space{n, 1, {0.0, 1.0}, {8.0, 1.0}};
    const auto hs = enumerate_hypotheses(n, 1);
    double lo = 1e300, hi = -1e300;
    for (std::size_t v = 0; v < hs.size(); ++v) {
      for (std::size_t w = v + 1; w < hs.size(); ++w) {
        const double oc = outer_conditional_chernoff(d.ensemble, space, hs[v], hs[w]).value;
        lo = std::min(lo, oc);
        hi = std::max(hi, oc);
      }
    }
    CHECK(hi - lo <= 1e-9);
    const auto fast = min_pairwise_exponent(d.ensemble, space, /*permutation_symmetric=*/true);
    CHECK(fast.exponent == doctest::Approx(lo).epsilon(1e-12));
  }
  SUBCASE("Theorem-4 style exponent for n=7") {
    const auto d = permutation_design(7, 8.0, 0.0, 1.0);
    const HypothesisSpace space{7, 1, {0.0, 1.0}, {8.0, 1.0}};
    const auto r = min_pairwise_exponent(d.ensemble, space);
    CHECK(r.exponent == doctest::Approx(64.0 / 24.0).epsilon(1e-9));
  }
}

TEST_CASE("sample complexity") {
  CHECK(sample_complexity(100, 1, 1.0, 0.01) == 10);
  CHECK(sample_complexity(100, 1, 1e12, 0.01) == 1);
  const auto m1 = sample_complexity(50, 2, 0.7, 0.01);
  const auto m2 = sample_complexity(50, 2, 1.4, 0.01);
  CHECK(m2 <= (m1 + 1) / 2 + 1);
  CHECK_THROWS_AS(sample_complexity(100, 1, 0.0, 0.01), ConfigError);
}
