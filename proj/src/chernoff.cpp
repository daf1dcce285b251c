#include "chtest/chernoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "chtest/errors.hpp"
#include "chtest/numeric.hpp"

namespace chtest {

namespace {

void require_positive_variances(const ScalarGaussian& p, const ScalarGaussian& q) {
  if (p.var <= 0.0 || q.var <= 0.0) {
    throw NumericError("lambda divergence requires strictly positive variances");
  }
}

/// Scalar projection of the joint distribution under hypothesis `h` onto
/// sensing vector `a`, using the diagonal structure of the joint.
ScalarGaussian project_hypothesis(const HypothesisSpace& space, const Hypothesis& h,
                                  const Eigen::VectorXd& a) {
  double sum_a = 0.0, sum_a2 = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    sum_a += a(i);
    sum_a2 += a(i) * a(i);
  }
  double mean = space.f1.mean * sum_a;
  double var = space.f1.var * sum_a2;
  const double dmu = space.f2.mean - space.f1.mean;
  const double dvar = space.f2.var - space.f1.var;
  for (int i : h.support) {
    mean += dmu * a(i);
    var += dvar * a(i) * a(i);
  }
  return {mean, var};
}

struct ProjectedPair {
  ScalarGaussian v, w;
  double prob;
};

/// Projections of both hypotheses onto every ensemble atom with positive
/// probability. Atoms with p_A(a) = 0 are outside the support and skipped.
std::vector<ProjectedPair> project_pairs(const SensingEnsemble& ensemble,
                                         const HypothesisSpace& space, const Hypothesis& hv,
                                         const Hypothesis& hw) {
  ensemble.validate();
  space.validate();
  hv.validate(space.n, space.k);
  hw.validate(space.n, space.k);
  if (ensemble.dim() != space.n) {
    throw ConfigError("ensemble vectors do not match the space dimension");
  }
  std::vector<ProjectedPair> pairs;
  pairs.reserve(ensemble.vectors.size());
  for (std::size_t i = 0; i < ensemble.vectors.size(); ++i) {
    if (ensemble.probabilities[i] <= 0.0) continue;
    const Eigen::VectorXd& a = ensemble.vectors[i];
    if (a.isZero(0.0)) {
      throw DegenerateProjection("all-zero sensing vector in ensemble support");
    }
    ProjectedPair pp;
    pp.v = project_hypothesis(space, hv, a);
    pp.w = project_hypothesis(space, hw, a);
    pp.prob = ensemble.probabilities[i];
    require_positive_variances(pp.v, pp.w);
    pairs.push_back(pp);
  }
  return pairs;
}

/// -ln int p_v^l p_w^(1-l) dy for one atom; the exponent l sits on the
/// hypothesis-v density.
double pair_lambda_divergence(const ScalarGaussian& pv, const ScalarGaussian& pw, double lambda) {
  return lambda_divergence_gaussian(pw, pv, lambda);
}

bool indistinguishable(const std::vector<ProjectedPair>& pairs) {
  for (const auto& pp : pairs) {
    if (!same_distribution(pp.v, pp.w)) return false;
  }
  return true;
}

}  // namespace

double lambda_divergence_gaussian(const ScalarGaussian& p, const ScalarGaussian& q,
                                  double lambda) {
  if (lambda < 0.0 || lambda > 1.0) {
    throw ConfigError("lambda_divergence_gaussian: lambda outside [0,1]");
  }
  require_positive_variances(p, q);
  const double mix = lambda * p.var + (1.0 - lambda) * q.var;
  const double dm = p.mean - q.mean;
  const double value = 0.5 * (std::log(mix) - lambda * std::log(p.var) -
                              (1.0 - lambda) * std::log(q.var)) +
                       lambda * (1.0 - lambda) * dm * dm / (2.0 * mix);
  return std::max(0.0, value);
}

DivergenceResult chernoff(const ScalarGaussian& p, const ScalarGaussian& q) {
  require_positive_variances(p, q);
  if (same_distribution(p, q)) return {0.0, 0.5, DivergenceMethod::closed_form};
  const auto best = maximize_on_unit_interval(
      [&](double lambda) { return lambda_divergence_gaussian(p, q, lambda); });
  return {std::max(0.0, best.value), best.x, DivergenceMethod::closed_form};
}

DivergenceResult chernoff_numeric(const std::function<double(double)>& p,
                                  const std::function<double(double)>& q, SupportHint hint,
                                  double abs_tol) {
  if (!(hint.hi > hint.lo)) throw ConfigError("chernoff_numeric: empty support hint");
  const auto objective = [&](double lambda) {
    const auto integrand = [&](double y) {
      const double py = p(y);
      const double qy = q(y);
      if (py <= 0.0 || qy <= 0.0) return 0.0;
      return std::exp((1.0 - lambda) * std::log(py) + lambda * std::log(qy));
    };
    const double integral = adaptive_simpson(integrand, hint.lo, hint.hi, abs_tol);
    if (integral <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log(integral);
  };
  const auto best = maximize_on_unit_interval(objective);
  if (!std::isfinite(best.value)) {
    throw NumericError("chernoff_numeric: vanishing overlap between densities on the hint");
  }
  return {std::max(0.0, best.value), best.x, DivergenceMethod::numeric_integration};
}

double variance_ratio_alpha(double B) {
  if (B < 1.0) throw ConfigError("variance_ratio_alpha: requires B >= 1 (orient B = max/min)");
  const double eps = B - 1.0;
  if (eps < 1e-6) return 0.5 + eps / 12.0;  // limit expansion at B -> 1
  const double logB = std::log(B);
  const double alpha = (-eps + B * logB) / (eps * logB);
  return std::clamp(alpha, 0.0, 1.0);
}

double variance_ratio_chernoff(double B) {
  if (B < 1.0) throw ConfigError("variance_ratio_chernoff: requires B >= 1 (orient B = max/min)");
  const double eps = B - 1.0;
  if (eps < 1e-7) return eps * eps / 16.0;  // limit expansion at B -> 1
  const double logB = std::log(B);
  const double value = 0.5 * (-1.0 + B / eps * logB + std::log(eps / (B * logB)));
  return std::max(0.0, value);
}

DivergenceResult inner_conditional_chernoff(const SensingEnsemble& ensemble,
                                            const HypothesisSpace& space, const Hypothesis& hv,
                                            const Hypothesis& hw) {
  const auto pairs = project_pairs(ensemble, space, hv, hw);
  if (indistinguishable(pairs)) return {0.0, 0.5, DivergenceMethod::closed_form};
  const auto objective = [&](double lambda) {
    // -ln E_A[Z_a(lambda)] with the log-sum-exp trick on Z_a = exp(-g_a).
    std::vector<double> g(pairs.size());
    double gmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      g[i] = pair_lambda_divergence(pairs[i].v, pairs[i].w, lambda);
      gmin = std::min(gmin, g[i]);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      acc += pairs[i].prob * std::exp(gmin - g[i]);
    }
    return gmin - std::log(acc);
  };
  const auto best = maximize_on_unit_interval(objective);
  return {std::max(0.0, best.value), best.x, DivergenceMethod::closed_form};
}

DivergenceResult outer_conditional_chernoff(const SensingEnsemble& ensemble,
                                            const HypothesisSpace& space, const Hypothesis& hv,
                                            const Hypothesis& hw) {
  const auto pairs = project_pairs(ensemble, space, hv, hw);
  if (indistinguishable(pairs)) return {0.0, 0.5, DivergenceMethod::closed_form};
  const auto objective = [&](double lambda) {
    double acc = 0.0;
    for (const auto& pp : pairs) {
      acc += pp.prob * pair_lambda_divergence(pp.v, pp.w, lambda);
    }
    return acc;
  };
  const auto best = maximize_on_unit_interval(objective);
  return {std::max(0.0, best.value), best.x, DivergenceMethod::closed_form};
}

TiltedBalance tilted_balance(const SensingEnsemble& ensemble, const HypothesisSpace& space,
                             const Hypothesis& hv, const Hypothesis& hw, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw ConfigError("tilted_balance: lambda must lie strictly inside (0,1)");
  }
  const auto pairs = project_pairs(ensemble, space, hv, hw);
  TiltedBalance out;
  for (const auto& pp : pairs) {
    // Geometric tilt p_v^lambda p_w^(1-lambda), normalized: a Gaussian whose
    // precision is the mixed precision of the pair.
    const double precision = lambda / pp.v.var + (1.0 - lambda) / pp.w.var;
    const double tilt_var = 1.0 / precision;
    const double tilt_mean =
        (lambda * pp.v.mean / pp.v.var + (1.0 - lambda) * pp.w.mean / pp.w.var) * tilt_var;
    const ScalarGaussian tilt{tilt_mean, tilt_var};
    out.q_vw += pp.prob * kl_gaussian(tilt, pp.v);
    out.q_wv += pp.prob * kl_gaussian(tilt, pp.w);
  }
  return out;
}

MinPairwiseExponent min_pairwise_exponent(const SensingEnsemble& ensemble,
                                          const HypothesisSpace& space, bool permutation_symmetric,
                                          std::uint64_t cap) {
  space.validate();
  MinPairwiseExponent out;
  out.exponent = std::numeric_limits<double>::infinity();

  const auto consider = [&](const Hypothesis& hv, const Hypothesis& hw) {
    const double oc = outer_conditional_chernoff(ensemble, space, hv, hw).value;
    if (oc < out.exponent) {
      out.exponent = oc;
      out.arg_v = hv;
      out.arg_w = hw;
    }
  };

  if (permutation_symmetric) {
    // Pairwise OC depends only on the support overlap; one representative
    // pair per overlap size suffices.
    const int k = space.k;
    for (int overlap = std::max(0, 2 * k - space.n); overlap < k; ++overlap) {
      Hypothesis hv, hw;
      for (int i = 0; i < k; ++i) hv.support.push_back(i);
      for (int i = 0; i < overlap; ++i) hw.support.push_back(i);
      for (int i = 0; i < k - overlap; ++i) hw.support.push_back(k + i);
      consider(hv, hw);
    }
    return out;
  }

  const auto hypotheses = enumerate_hypotheses(space.n, space.k, cap);
  for (std::size_t v = 0; v < hypotheses.size(); ++v) {
    for (std::size_t w = v + 1; w < hypotheses.size(); ++w) {
      consider(hypotheses[v], hypotheses[w]);
    }
  }
  return out;
}

std::uint64_t sample_complexity(int n, int k, double exponent, double delta) {
  if (k < 1 || k >= n) throw ConfigError("sample_complexity: requires 1 <= k < n");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("sample_complexity: delta outside (0,1)");
  if (!(exponent > 0.0)) {
    throw ConfigError("sample_complexity: hypotheses indistinguishable (exponent <= 0)");
  }
  const double bound = (log_binomial(n, k) + std::log(1.0 / delta)) / exponent;
  if (bound >= 9e18) throw NumericError("sample_complexity: bound exceeds representable range");
  const double m = std::ceil(bound);
  return m < 1.0 ? 1 : static_cast<std::uint64_t>(m);
}

}  // namespace chtest
