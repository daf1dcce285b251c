#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "chtest/observe.hpp"

namespace chtest {

/// The three rows of the (7,4) Hamming parity-check matrix, used as sensing
/// vectors. Every pair of variables is separated by at least one row that
/// covers exactly one of the two.
std::vector<Eigen::VectorXd> hamming74_rows();

/// Regular (or near-regular) sparse bipartite sensing graph: m measurement
/// rows of exactly `check_degree` distinct 0/1 entries, column degrees equal
/// when n divides check_degree*m and differing by at most one otherwise.
struct BipartiteDesign {
  int n = 0;
  int m = 0;
  int check_degree = 0;
  int variable_degree = -1;  // -1 in near-regular mode
  std::uint64_t seed = 0;
  std::vector<std::vector<int>> rows;  // sorted column indices per row

  Eigen::MatrixXd dense() const;
  std::vector<Eigen::VectorXd> row_vectors() const;
  SensingStrategy as_schedule() const;
  std::vector<int> column_degrees() const;
  void validate() const;
};

/// Socket-permutation construction: check_degree*m edge stubs are matched to
/// variable sockets by a seeded shuffle; duplicate edges within a row are
/// repaired by switch resampling so entries stay 0/1. Strict mode requires
/// n | check_degree*m.
BipartiteDesign sparse_bipartite(int n, int m, int check_degree, std::uint64_t seed,
                                 bool near_regular = false);

/// Separate-observation baseline: floor(m/n) coordinate observations of every
/// variable plus one extra observation of each of (m mod n) seeded-uniform
/// distinct variables; exactly m rows.
SensingStrategy separate_baseline(int n, int m, std::uint64_t seed);

struct OptimalVectorEqualCov {
  Eigen::VectorXd vector;
  double exponent = 0.0;
};

/// Equal-covariance two-hypothesis case: a = Sigma^{-1}(mu1 - mu2) maximizes
/// the Chernoff information, which equals (mu1-mu2)' Sigma^{-1} (mu1-mu2)/8.
OptimalVectorEqualCov optimal_vector_equal_cov(const Eigen::VectorXd& mu1,
                                               const Eigen::VectorXd& mu2,
                                               const Eigen::MatrixXd& sigma);

struct OptimalVectorEqualMean {
  Eigen::VectorXd vector;  // unit norm, largest-|component| entry positive
  double B = 1.0;          // achieved variance ratio (>= 1)
  double exponent = 0.0;   // variance_ratio_chernoff(B)
  bool tie = false;        // both quotient orientations achieve B
};

/// Equal-mean case: maximize the variance ratio between the two projected
/// observation distributions. The two quadratic programs reduce to
/// symmetric-definite generalized eigenproblems solved by Cholesky
/// whitening; the larger of the two top eigenvalues is B.
OptimalVectorEqualMean optimal_vector_equal_mean(const Eigen::MatrixXd& sigma1,
                                                 const Eigen::MatrixXd& sigma2);

struct PermutationDesign {
  Eigen::VectorXd a_star;    // [1/sqrt2, -1/sqrt2, 0, ...]
  SensingEnsemble ensemble;  // uniform over the n(n-1)/2 distinct pair supports
  double mixed_exponent = 0.0;     // (mu1-mu2)^2 / (4 sigma^2 (n-1))
  double separate_exponent = 0.0;  // (mu1-mu2)^2 / (4 sigma^2 n)
};

/// Optimal k=1 design for equal-variance Gaussians distinguished by mean:
/// mix two uniformly chosen variables with weights +-1/sqrt2. The n!
/// permutation mixture collapses onto the distinct pair supports without
/// changing any pairwise outer Chernoff information.
PermutationDesign permutation_design(int n, double mu1, double mu2, double var);

/// Average squared coordinate difference sum_{i<j} (a_i - a_j)^2 / C(n,2);
/// the objective the permutation design's base vector maximizes over the
/// unit ball.
double uniform_pair_objective(const Eigen::VectorXd& a);

/// Coordinate sensing vectors with probability 1/n each.
SensingEnsemble separate_ensemble(int n);

}  // namespace chtest
