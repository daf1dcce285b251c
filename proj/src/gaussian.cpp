#include "chtest/gaussian.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "chtest/errors.hpp"

namespace chtest {

namespace {
constexpr double kLogTwoPi = 1.8378770664093453;
}

double ScalarGaussian::log_pdf(double y) const {
  if (var <= 0.0) throw NumericError("ScalarGaussian::log_pdf: nonpositive variance");
  const double d = y - mean;
  return -0.5 * (kLogTwoPi + std::log(var) + d * d / var);
}

double ScalarGaussian::pdf(double y) const { return std::exp(log_pdf(y)); }

void ScalarGaussian::validate() const {
  if (!std::isfinite(mean) || !std::isfinite(var) || var < 0.0) {
    throw ConfigError("ScalarGaussian: mean/var must be finite with var >= 0");
  }
}

bool same_distribution(const ScalarGaussian& a, const ScalarGaussian& b, double tol) {
  return std::abs(a.mean - b.mean) <= tol && std::abs(a.var - b.var) <= tol;
}

double kl_gaussian(const ScalarGaussian& from, const ScalarGaussian& to) {
  if (from.var <= 0.0 || to.var <= 0.0) {
    throw NumericError("kl_gaussian: nonpositive variance");
  }
  const double d = from.mean - to.mean;
  return 0.5 * (from.var / to.var + d * d / to.var - 1.0 + std::log(to.var / from.var));
}

void Gaussian::validate() const {
  const int d = dim();
  if (d < 1) throw ConfigError("Gaussian: empty mean vector");
  if (cov.rows() != d || cov.cols() != d) {
    throw ConfigError("Gaussian: covariance shape does not match mean dimension");
  }
  if (!mean.allFinite() || !cov.allFinite()) throw ConfigError("Gaussian: non-finite entries");

  const double scale = std::max(1e-300, cov.cwiseAbs().maxCoeff());
  bool diagonal = true;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      if (std::abs(cov(i, j) - cov(j, i)) > 1e-12 * scale) {
        throw ConfigError("Gaussian: covariance not symmetric within tolerance");
      }
      if (cov(i, j) != 0.0 || cov(j, i) != 0.0) diagonal = false;
    }
  }
  if (diagonal) {
    for (int i = 0; i < d; ++i) {
      if (cov(i, i) < -1e-10 * scale) {
        throw ConfigError("Gaussian: negative variance on the diagonal");
      }
    }
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
  const double max_eig = es.eigenvalues().maxCoeff();
  if (es.eigenvalues().minCoeff() < -1e-10 * std::max(max_eig, 0.0) - 1e-300) {
    std::ostringstream msg;
    msg << "Gaussian: covariance not PSD (min eigenvalue " << es.eigenvalues().minCoeff() << ")";
    throw ConfigError(msg.str());
  }
}

Gaussian Gaussian::scalar(double mean, double var) {
  Gaussian g;
  g.mean = Eigen::VectorXd::Constant(1, mean);
  g.cov = Eigen::MatrixXd::Constant(1, 1, var);
  g.validate();
  return g;
}

Gaussian Gaussian::diagonal(Eigen::VectorXd mean, Eigen::VectorXd variances) {
  if (mean.size() != variances.size()) {
    throw ConfigError("Gaussian::diagonal: mean/variance size mismatch");
  }
  Gaussian g;
  g.mean = std::move(mean);
  g.cov = variances.asDiagonal();
  g.validate();
  return g;
}

ScalarGaussian Gaussian::to_scalar() const {
  if (dim() != 1) throw ConfigError("Gaussian::to_scalar: dimension != 1");
  return {mean(0), cov(0, 0)};
}

ScalarGaussian project(const Eigen::VectorXd& a, const Gaussian& joint) {
  if (a.size() != joint.dim()) throw ConfigError("project: dimension mismatch");
  if (a.isZero(0.0)) throw DegenerateProjection("project: all-zero sensing vector");
  const double var = a.dot(joint.cov * a);
  if (var < -1e-10) throw NumericError("project: covariance not PSD along sensing vector");
  return {a.dot(joint.mean), std::max(var, 0.0)};
}

}  // namespace chtest
