#pragma once

#include <cstdint>
#include <functional>

#include "chtest/gaussian.hpp"
#include "chtest/hypothesis.hpp"
#include "chtest/observe.hpp"

namespace chtest {

enum class DivergenceMethod { closed_form, numeric_integration };

struct DivergenceResult {
  double value = 0.0;        // nats, >= 0
  double lambda_star = 0.5;  // maximizing mixing parameter in [0,1]
  DivergenceMethod method = DivergenceMethod::closed_form;
};

/// Gaussian lambda-divergence in nats:
///   0.5*ln((l*vp + (1-l)*vq)/(vp^l * vq^(1-l)))
///     + l*(1-l)*(mp-mq)^2 / (2*(l*vp + (1-l)*vq)),
/// i.e. -ln int p^(1-l) q^l dy. Zero at both endpoints; its maximum over
/// lambda is the Chernoff information.
double lambda_divergence_gaussian(const ScalarGaussian& p, const ScalarGaussian& q, double lambda);

/// Chernoff information between scalar Gaussians (closed form under the
/// lambda search). lambda_star is the argmax of lambda_divergence_gaussian,
/// so for a variance-only pair with the smaller variance first it equals
/// variance_ratio_alpha of the variance ratio.
DivergenceResult chernoff(const ScalarGaussian& p, const ScalarGaussian& q);

struct SupportHint {
  double lo = 0.0;
  double hi = 0.0;
};

/// Chernoff information for generic densities by adaptive Simpson on the
/// hinted support. The lambda orientation matches the Gaussian overload.
DivergenceResult chernoff_numeric(const std::function<double(double)>& p,
                                  const std::function<double(double)>& q, SupportHint hint,
                                  double abs_tol = 1e-10);

/// Maximizing mixing weight for a variance-ratio pair:
/// (-(B-1) + B ln B) / ((B-1) ln B), with the B=1 limit 1/2.
double variance_ratio_alpha(double B);

/// Chernoff information of N(mu, v) vs N(mu, B*v):
/// 0.5*(-1 + B/(B-1) ln B + ln((B-1)/(B ln B))); 0 at B=1, increasing in B.
double variance_ratio_chernoff(double B);

/// Inner conditional Chernoff information between hypotheses hv, hw under a
/// discrete sensing ensemble: the expectation over sensing vectors is taken
/// inside the log, -min_l ln E_A[ int p_v^l p_w^(1-l) dy ].
DivergenceResult inner_conditional_chernoff(const SensingEnsemble& ensemble,
                                            const HypothesisSpace& space, const Hypothesis& hv,
                                            const Hypothesis& hw);

/// Outer conditional Chernoff information: expectation outside the log,
/// -min_l E_A[ ln int p_v^l p_w^(1-l) dy ]. Governs deterministic
/// time-varying schedules; never below the inner form. lambda_star is the
/// exponent on the hypothesis-hv densities.
DivergenceResult outer_conditional_chernoff(const SensingEnsemble& ensemble,
                                            const HypothesisSpace& space, const Hypothesis& hv,
                                            const Hypothesis& hw);

struct TiltedBalance {
  double q_vw = 0.0;  // E_A D(P_lambda || p(.|Hv))
  double q_wv = 0.0;  // E_A D(P_lambda || p(.|Hw))
};

/// Expected KL divergences from the per-vector tilted Gaussian
/// P_lambda ~ p_v^lambda p_w^(1-lambda) (normalized) to each hypothesis's
/// projected distribution. At the lambda_star reported by
/// outer_conditional_chernoff the two sides balance and both equal the OC
/// value; as lambda -> 0 the tilt collapses onto p_w and q_wv -> 0.
TiltedBalance tilted_balance(const SensingEnsemble& ensemble, const HypothesisSpace& space,
                             const Hypothesis& hv, const Hypothesis& hw, double lambda);

struct MinPairwiseExponent {
  double exponent = 0.0;
  Hypothesis arg_v, arg_w;
};

/// Minimum outer conditional Chernoff information over all hypothesis pairs:
/// the error exponent of the hypothesis test. When the caller asserts the
/// ensemble is permutation-invariant, only one representative pair per
/// support-overlap class is evaluated.
MinPairwiseExponent min_pairwise_exponent(const SensingEnsemble& ensemble,
                                          const HypothesisSpace& space,
                                          bool permutation_symmetric = false,
                                          std::uint64_t cap = kDefaultHypothesisCap);

/// Measurements needed to drive the union-bound error probability
/// C(n,k) * exp(-mE) below delta: ceil(ln(C(n,k)/delta)/E), at least 1.
/// An order-of-magnitude planning figure, exponents in nats.
std::uint64_t sample_complexity(int n, int k, double exponent, double delta = 0.01);

}  // namespace chtest
