#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "chtest/hypothesis.hpp"
#include "chtest/observe.hpp"

namespace chtest {

/// Outcome of one detector on one observation set. An absent decision is the
/// pairwise tournament's explicit failure (no hypothesis won all its
/// matches); iterative detectors that stop at their iteration cap still
/// return their best decision with converged = false.
struct DetectionResult {
  std::optional<Hypothesis> decision;
  std::vector<double> scores;  // per-hypothesis log-likelihoods or per-variable marginals
  int iterations = 0;
  bool tie = false;
  bool converged = true;
};

/// Joint log-likelihood of the observations under hypothesis h, conditioning
/// on the realized sensing vectors (the vector distribution is
/// hypothesis-independent, so it cancels from every ratio).
double log_likelihood(const HypothesisSpace& space, const Hypothesis& h,
                      const ObservationSet& obs);

/// Full likelihood-ratio test over all C(n,k) hypotheses; ties broken to the
/// lexicographically smallest support and flagged.
DetectionResult lrt_full(const HypothesisSpace& space, const ObservationSet& obs,
                         std::uint64_t cap = kDefaultHypothesisCap);

/// Round-robin of pairwise Neyman-Pearson tests at log-likelihood-ratio
/// threshold 0: returns the hypothesis that wins every match, or failure if
/// none does (only exact score ties can block a winner here, since the
/// per-set ordering is total).
DetectionResult pairwise_np(const HypothesisSpace& space, const ObservationSet& obs,
                            std::uint64_t cap = kDefaultHypothesisCap);

struct LassoResult {
  Eigen::VectorXd x;
  int sweeps = 0;
};

/// minimize 0.5*||y - A x||^2 + lambda*||x||_1 by cyclic coordinate descent
/// with soft thresholding. Stops when no coordinate moves more than tol in
/// one sweep; throws IterationLimit (carrying the last iterate) at
/// max_sweeps. An optional trace records the objective after each sweep.
LassoResult lasso_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double lambda,
                        double tol = 1e-8, int max_sweeps = 10000,
                        std::vector<double>* objective_trace = nullptr);

/// Default penalty: sigma * sqrt(2 ln n) * max column norm.
double lasso_default_lambda(const Eigen::MatrixXd& a, double sigma);

/// LASSO support selection for mean anomalies: observations are pre-centered
/// by the normal mean (y - A*mu1*1) so the anomalous mean shift is the
/// sparse signal, then the k largest |x| win. lambda <= 0 selects the
/// default penalty.
DetectionResult lasso_detect(const HypothesisSpace& space, const ObservationSet& obs,
                             double lambda = 0.0);

struct MpOptions {
  int max_iters = 200;
  double damping = 0.5;    // new = damping*update + (1-damping)*old, in log-odds
  double tol = 1e-6;       // max log-odds change at convergence
  double clamp = 30.0;     // message magnitude bound
  double prior = -1.0;     // abnormal prior per variable; < 0 means k/n
};

/// Bipartite factor graph of a 0/1 sensing matrix: variables on one side,
/// measurements on the other, an edge where a variable enters a measurement.
struct FactorGraph {
  int n_vars = 0;
  int n_checks = 0;
  std::vector<std::vector<int>> var_checks;
  std::vector<std::vector<int>> check_vars;

  static FactorGraph from_observations(const ObservationSet& obs, int max_check_degree = 20);
};

/// Sum-product message passing on the sensing graph. Check-to-variable
/// messages are exact likelihood-ratio updates, enumerating the abnormal
/// count of the other neighbors under their incoming probabilities; the
/// measurement likelihood is the Gaussian of the summed mixture components.
/// Variables carry an independent Bernoulli(k/n) prior. Decision: top-k
/// marginals, ties lexicographic.
DetectionResult mp_detect(const HypothesisSpace& space, const ObservationSet& obs,
                          const MpOptions& options = {});

/// Exact per-variable abnormal probabilities under the uniform prior over
/// the C(n,k) supports; the testing oracle for the detectors.
std::vector<double> mp_exact_posterior(const HypothesisSpace& space, const ObservationSet& obs,
                                       std::uint64_t cap = 10'000);

}  // namespace chtest
