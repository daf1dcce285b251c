#include "chtest/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "chtest/chernoff.hpp"
#include "chtest/errors.hpp"
#include "chtest/rng.hpp"

namespace chtest {

std::vector<Eigen::VectorXd> hamming74_rows() {
  const int rows[3][7] = {
      {1, 0, 0, 1, 1, 0, 1},
      {0, 1, 0, 1, 0, 1, 1},
      {0, 0, 1, 0, 1, 1, 1},
  };
  std::vector<Eigen::VectorXd> out(3, Eigen::VectorXd::Zero(7));
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 7; ++c) out[r](c) = rows[r][c];
  }
  return out;
}

Eigen::MatrixXd BipartiteDesign::dense() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
  for (int r = 0; r < m; ++r) {
    for (int c : rows[r]) a(r, c) = 1.0;
  }
  return a;
}

std::vector<Eigen::VectorXd> BipartiteDesign::row_vectors() const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(m);
  for (int r = 0; r < m; ++r) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (int c : rows[r]) v(c) = 1.0;
    out.push_back(std::move(v));
  }
  return out;
}

SensingStrategy BipartiteDesign::as_schedule() const { return SensingStrategy::schedule(row_vectors()); }

std::vector<int> BipartiteDesign::column_degrees() const {
  std::vector<int> deg(n, 0);
  for (const auto& row : rows) {
    for (int c : row) ++deg[c];
  }
  return deg;
}

void BipartiteDesign::validate() const {
  if (static_cast<int>(rows.size()) != m) throw ConfigError("BipartiteDesign: row count mismatch");
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != check_degree) {
      throw ConfigError("BipartiteDesign: row degree mismatch");
    }
    for (std::size_t i = 1; i < row.size(); ++i) {
      if (row[i] <= row[i - 1]) throw ConfigError("BipartiteDesign: repeated or unsorted entry");
    }
    if (row.front() < 0 || row.back() >= n) throw ConfigError("BipartiteDesign: index out of range");
  }
  const auto deg = column_degrees();
  const auto [lo, hi] = std::minmax_element(deg.begin(), deg.end());
  if (variable_degree >= 0) {
    if (*lo != variable_degree || *hi != variable_degree) {
      throw ConfigError("BipartiteDesign: column degrees not regular");
    }
  } else if (*hi - *lo > 1) {
    throw ConfigError("BipartiteDesign: column degrees differ by more than one");
  }
}

BipartiteDesign sparse_bipartite(int n, int m, int check_degree, std::uint64_t seed,
                                 bool near_regular) {
  if (n < 1 || m < 1 || check_degree < 1) throw ConfigError("sparse_bipartite: bad sizes");
  if (check_degree > n) throw ConfigError("sparse_bipartite: check_degree exceeds n");
  const long long edges = static_cast<long long>(check_degree) * m;
  if (!near_regular && edges % n != 0) {
    std::ostringstream msg;
    msg << "sparse_bipartite: strict mode needs n | degree*m, but " << check_degree << "*" << m
        << "/" << n << " = " << static_cast<double>(edges) / n << " is not an integer";
    throw ConfigError(msg.str());
  }

  Rng rng(seed);
  // Variable sockets: base degree everywhere, the remainder spread over a
  // seeded random subset of variables in near-regular mode.
  const int base_degree = static_cast<int>(edges / n);
  const int remainder = static_cast<int>(edges % n);
  std::vector<int> sockets;
  sockets.reserve(edges);
  std::vector<int> extra(n, 0);
  if (remainder > 0) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = 0; i < remainder; ++i) {
      const int j = i + static_cast<int>(rng.uniform_below(n - i));
      std::swap(perm[i], perm[j]);
      extra[perm[i]] = 1;
    }
  }
  for (int v = 0; v < n; ++v) {
    for (int d = 0; d < base_degree + extra[v]; ++d) sockets.push_back(v);
  }

  // Uniform permutation of the sockets, then consecutive blocks of
  // check_degree become rows.
  for (int i = static_cast<int>(sockets.size()) - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_below(i + 1));
    std::swap(sockets[i], sockets[j]);
  }

  // Switch resampling: a duplicate within a row swaps with a uniformly
  // chosen socket elsewhere, accepted only if both affected rows stay
  // duplicate-free. Collisions are rare for degree << n.
  const auto row_of = [&](int idx) { return idx / check_degree; };
  const auto row_has = [&](int row, int value, int skip_idx) {
    for (int t = row * check_degree; t < (row + 1) * check_degree; ++t) {
      if (t != skip_idx && sockets[t] == value) return true;
    }
    return false;
  };
  long long attempts = 0;
  const long long attempt_cap = 1'000'000 + 100LL * edges;
  for (int r = 0; r < m; ++r) {
    for (int t = r * check_degree; t < (r + 1) * check_degree; ++t) {
      while (row_has(r, sockets[t], t)) {
        if (++attempts > attempt_cap) {
          throw NumericError("sparse_bipartite: switch resampling did not converge");
        }
        const int u = static_cast<int>(rng.uniform_below(sockets.size()));
        const int ru = row_of(u);
        if (ru == r) continue;
        if (row_has(r, sockets[u], t) || row_has(ru, sockets[t], u)) continue;
        std::swap(sockets[t], sockets[u]);
      }
    }
  }

  BipartiteDesign design;
  design.n = n;
  design.m = m;
  design.check_degree = check_degree;
  design.variable_degree = remainder == 0 ? base_degree : -1;
  design.seed = seed;
  design.rows.resize(m);
  for (int r = 0; r < m; ++r) {
    design.rows[r].assign(sockets.begin() + static_cast<long>(r) * check_degree,
                          sockets.begin() + static_cast<long>(r + 1) * check_degree);
    std::sort(design.rows[r].begin(), design.rows[r].end());
  }
  design.validate();
  return design;
}

SensingStrategy separate_baseline(int n, int m, std::uint64_t seed) {
  if (n < 1 || m < 1) throw ConfigError("separate_baseline: bad sizes");
  std::vector<Eigen::VectorXd> schedule;
  schedule.reserve(m);
  const auto coordinate = [&](int i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v(i) = 1.0;
    return v;
  };
  const int passes = m / n;
  for (int p = 0; p < passes; ++p) {
    for (int i = 0; i < n; ++i) schedule.push_back(coordinate(i));
  }
  const int remainder = m % n;
  if (remainder > 0) {
    Rng rng(seed);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = 0; i < remainder; ++i) {
      const int j = i + static_cast<int>(rng.uniform_below(n - i));
      std::swap(perm[i], perm[j]);
      schedule.push_back(coordinate(perm[i]));
    }
  }
  return SensingStrategy::schedule(std::move(schedule));
}

OptimalVectorEqualCov optimal_vector_equal_cov(const Eigen::VectorXd& mu1,
                                               const Eigen::VectorXd& mu2,
                                               const Eigen::MatrixXd& sigma) {
  if (mu1.size() != mu2.size() || sigma.rows() != mu1.size() || sigma.cols() != mu1.size()) {
    throw ConfigError("optimal_vector_equal_cov: dimension mismatch");
  }
  const Eigen::VectorXd diff = mu1 - mu2;
  if (diff.isZero(0.0)) {
    throw ConfigError("optimal_vector_equal_cov: identical means give a zero exponent");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw NumericError("optimal_vector_equal_cov: covariance is not positive definite");
  }
  OptimalVectorEqualCov out;
  out.vector = llt.solve(diff);
  out.exponent = 0.125 * diff.dot(out.vector);
  return out;
}

namespace {

/// Top eigenpair of L2^{-1} S1 L2^{-T} mapped back through the whitening,
/// i.e. the maximizer of a'S1a / a'S2a with its maximum value.
std::pair<double, Eigen::VectorXd> top_generalized_eig(const Eigen::MatrixXd& s1,
                                                       const Eigen::LLT<Eigen::MatrixXd>& llt2) {
  const Eigen::MatrixXd l = llt2.matrixL();
  const Eigen::MatrixXd half = l.triangularView<Eigen::Lower>().solve(s1);
  const Eigen::MatrixXd white =
      l.triangularView<Eigen::Lower>().solve(half.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (white + white.transpose()));
  if (es.info() != Eigen::Success) {
    throw NumericError("optimal_vector_equal_mean: eigensolver failed");
  }
  const int last = static_cast<int>(white.rows()) - 1;
  const Eigen::VectorXd w = es.eigenvectors().col(last);
  Eigen::VectorXd a = l.transpose().triangularView<Eigen::Upper>().solve(w);
  return {es.eigenvalues()(last), std::move(a)};
}

void canonicalize_sign(Eigen::VectorXd& a) {
  int imax = 0;
  for (int i = 1; i < a.size(); ++i) {
    if (std::abs(a(i)) > std::abs(a(imax))) imax = i;
  }
  if (a(imax) < 0.0) a = -a;
}

}  // namespace

OptimalVectorEqualMean optimal_vector_equal_mean(const Eigen::MatrixXd& sigma1,
                                                 const Eigen::MatrixXd& sigma2) {
  if (sigma1.rows() != sigma1.cols() || sigma2.rows() != sigma2.cols() ||
      sigma1.rows() != sigma2.rows()) {
    throw ConfigError("optimal_vector_equal_mean: dimension mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt1(sigma1), llt2(sigma2);
  if (llt1.info() != Eigen::Success || llt2.info() != Eigen::Success) {
    throw NumericError("optimal_vector_equal_mean: covariance is not positive definite");
  }
  const auto [b1, a1] = top_generalized_eig(sigma1, llt2);
  const auto [b2, a2] = top_generalized_eig(sigma2, llt1);

  OptimalVectorEqualMean out;
  out.tie = std::abs(b1 - b2) <= 1e-9 * std::max(b1, b2);
  if (b1 >= b2) {
    out.B = b1;
    out.vector = a1;
  } else {
    out.B = b2;
    out.vector = a2;
  }
  out.vector.normalize();
  canonicalize_sign(out.vector);
  out.B = std::max(out.B, 1.0);
  out.exponent = variance_ratio_chernoff(out.B);
  return out;
}

PermutationDesign permutation_design(int n, double mu1, double mu2, double var) {
  if (n < 2) throw ConfigError("permutation_design: requires n >= 2");
  if (!(var > 0.0)) throw ConfigError("permutation_design: variance must be positive");
  if (mu1 == mu2) throw ConfigError("permutation_design: means must differ");

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  PermutationDesign out;
  out.a_star = Eigen::VectorXd::Zero(n);
  out.a_star(0) = inv_sqrt2;
  out.a_star(1) = -inv_sqrt2;

  const int pair_count = n * (n - 1) / 2;
  out.ensemble.vectors.reserve(pair_count);
  out.ensemble.probabilities.assign(pair_count, 1.0 / pair_count);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
      v(i) = inv_sqrt2;
      v(j) = -inv_sqrt2;
      out.ensemble.vectors.push_back(std::move(v));
    }
  }

  const double d2 = (mu1 - mu2) * (mu1 - mu2);
  out.mixed_exponent = d2 / (4.0 * var * (n - 1));
  out.separate_exponent = d2 / (4.0 * var * n);
  return out;
}

double uniform_pair_objective(const Eigen::VectorXd& a) {
  const int n = static_cast<int>(a.size());
  if (n < 2) throw ConfigError("uniform_pair_objective: needs at least two coordinates");
  // sum_{i<j} (a_i - a_j)^2 = n*sum a_i^2 - (sum a_i)^2
  const double sum = a.sum();
  const double sum2 = a.squaredNorm();
  const double pairs = 0.5 * n * (n - 1);
  return (n * sum2 - sum * sum) / pairs;
}

SensingEnsemble separate_ensemble(int n) {
  if (n < 1) throw ConfigError("separate_ensemble: n must be positive");
  SensingEnsemble e;
  e.vectors.reserve(n);
  e.probabilities.assign(n, 1.0 / n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v(i) = 1.0;
    e.vectors.push_back(std::move(v));
  }
  return e;
}

}  // namespace chtest
