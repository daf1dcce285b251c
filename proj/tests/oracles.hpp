// Test-only oracles, deliberately independent of the library's numeric
// paths: fixed-grid composite Simpson instead of adaptive recursion, direct
// summations instead of closed forms, exhaustive state enumeration instead
// of message passing.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "chtest/gaussian.hpp"
#include "chtest/hypothesis.hpp"
#include "chtest/observe.hpp"

namespace oracle {

/// Composite Simpson on a fixed grid; `points` must be odd.
inline double composite_simpson(const std::function<double(double)>& f, double lo, double hi,
                                int points = 20001) {
  if (points % 2 == 0) ++points;
  const double h = (hi - lo) / (points - 1);
  double acc = f(lo) + f(hi);
  for (int i = 1; i < points - 1; ++i) {
    acc += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

inline double gaussian_pdf(double y, double mean, double var) {
  return std::exp(-0.5 * (y - mean) * (y - mean) / var) / std::sqrt(2.0 * M_PI * var);
}

/// -ln int p^(1-lambda) q^lambda dy by quadrature over a wide window.
inline double numeric_lambda_divergence(const chtest::ScalarGaussian& p,
                                        const chtest::ScalarGaussian& q, double lambda) {
  const double sd = std::sqrt(std::max(p.var, q.var));
  const double lo = std::min(p.mean, q.mean) - 12.0 * sd;
  const double hi = std::max(p.mean, q.mean) + 12.0 * sd;
  const double integral = composite_simpson(
      [&](double y) {
        return std::pow(gaussian_pdf(y, p.mean, p.var), 1.0 - lambda) *
               std::pow(gaussian_pdf(y, q.mean, q.var), lambda);
      },
      lo, hi);
  return -std::log(integral);
}

/// Numeric Chernoff information: coarse lambda grid then ternary refinement,
/// every evaluation a fresh quadrature.
inline double numeric_chernoff(const chtest::ScalarGaussian& p, const chtest::ScalarGaussian& q,
                               int grid = 41) {
  double best_x = 0.5, best = -1.0;
  for (int i = 0; i <= grid; ++i) {
    const double lambda = static_cast<double>(i) / grid;
    const double v = numeric_lambda_divergence(p, q, lambda);
    if (v > best) {
      best = v;
      best_x = lambda;
    }
  }
  double lo = std::max(0.0, best_x - 1.0 / grid);
  double hi = std::min(1.0, best_x + 1.0 / grid);
  for (int iter = 0; iter < 120; ++iter) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (numeric_lambda_divergence(p, q, m1) < numeric_lambda_divergence(p, q, m2)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  return std::max(best, numeric_lambda_divergence(p, q, 0.5 * (lo + hi)));
}

/// KL divergence by quadrature.
inline double numeric_kl(const chtest::ScalarGaussian& from, const chtest::ScalarGaussian& to) {
  const double sd = std::sqrt(std::max(from.var, to.var));
  const double lo = std::min(from.mean, to.mean) - 14.0 * sd;
  const double hi = std::max(from.mean, to.mean) + 14.0 * sd;
  return composite_simpson(
      [&](double y) {
        const double f = gaussian_pdf(y, from.mean, from.var);
        if (f <= 0.0) return 0.0;
        return f * std::log(f / gaussian_pdf(y, to.mean, to.var));
      },
      lo, hi);
}

/// The pair objective as a literal double sum over i < j.
inline double direct_pair_objective(const Eigen::VectorXd& a) {
  const int n = static_cast<int>(a.size());
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      acc += (a(i) - a(j)) * (a(i) - a(j));
    }
  }
  return acc / (0.5 * n * (n - 1));
}

/// Per-hypothesis log-likelihood the long way: full projection per record.
inline double direct_log_likelihood(const chtest::HypothesisSpace& space,
                                    const chtest::Hypothesis& h,
                                    const chtest::ObservationSet& obs) {
  double ll = 0.0;
  for (const auto& record : obs.records) {
    double mean = 0.0, var = 0.0;
    for (int i = 0; i < space.n; ++i) {
      const bool abnormal = h.contains(i);
      mean += record.vector(i) * (abnormal ? space.f2.mean : space.f1.mean);
      var += record.vector(i) * record.vector(i) * (abnormal ? space.f2.var : space.f1.var);
    }
    ll += std::log(gaussian_pdf(record.value, mean, var));
  }
  return ll;
}

/// Exact marginals of the independent-Bernoulli-prior model by enumerating
/// all 2^n abnormality patterns; the ground truth for sum-product on trees.
inline std::vector<double> bernoulli_exhaustive_posterior(const chtest::HypothesisSpace& space,
                                                          const chtest::ObservationSet& obs,
                                                          double prior) {
  const int n = space.n;
  std::vector<double> numerators(n, 0.0), log_weights;
  std::vector<std::uint32_t> states;
  double max_lw = -1e300;
  for (std::uint32_t state = 0; state < (1u << n); ++state) {
    double lw = 0.0;
    for (int i = 0; i < n; ++i) {
      lw += (state >> i) & 1u ? std::log(prior) : std::log(1.0 - prior);
    }
    for (const auto& record : obs.records) {
      double mean = 0.0, var = 0.0;
      for (int i = 0; i < n; ++i) {
        if (record.vector(i) == 0.0) continue;
        const bool abnormal = (state >> i) & 1u;
        mean += abnormal ? space.f2.mean : space.f1.mean;
        var += abnormal ? space.f2.var : space.f1.var;
      }
      lw += std::log(gaussian_pdf(record.value, mean, var));
    }
    states.push_back(state);
    log_weights.push_back(lw);
    max_lw = std::max(max_lw, lw);
  }
  double norm = 0.0;
  for (std::size_t s = 0; s < states.size(); ++s) {
    const double w = std::exp(log_weights[s] - max_lw);
    norm += w;
    for (int i = 0; i < n; ++i) {
      if ((states[s] >> i) & 1u) numerators[i] += w;
    }
  }
  for (double& v : numerators) v /= norm;
  return numerators;
}

}  // namespace oracle
