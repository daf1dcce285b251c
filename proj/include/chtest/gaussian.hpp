#pragma once

#include <Eigen/Core>

namespace chtest {

/// Univariate Gaussian, the workhorse of every projected-observation
/// computation. Variance may be zero only where a consumer allows it;
/// divergence routines require var > 0.
struct ScalarGaussian {
  double mean = 0.0;
  double var = 1.0;

  double log_pdf(double y) const;
  double pdf(double y) const;
  void validate() const;  // var >= 0 and finite fields
};

bool same_distribution(const ScalarGaussian& a, const ScalarGaussian& b, double tol = 1e-12);

/// KL divergence D(from || to) between scalar Gaussians, in nats.
double kl_gaussian(const ScalarGaussian& from, const ScalarGaussian& to);

/// Multivariate Gaussian with full covariance (d = 1 permitted).
struct Gaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  int dim() const { return static_cast<int>(mean.size()); }

  /// Checks symmetry (1e-12 relative) and positive semidefiniteness
  /// (eigenvalues >= -1e-10 * max eigenvalue). Diagonal matrices take a
  /// cheap path without an eigensolve.
  void validate() const;

  static Gaussian scalar(double mean, double var);
  static Gaussian diagonal(Eigen::VectorXd mean, Eigen::VectorXd variances);

  ScalarGaussian to_scalar() const;  // requires dim() == 1
};

/// Projection onto a sensing vector: N(a'mu, a'Sigma a).
ScalarGaussian project(const Eigen::VectorXd& a, const Gaussian& joint);

}  // namespace chtest
