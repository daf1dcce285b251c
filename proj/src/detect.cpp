#include "chtest/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "chtest/errors.hpp"

namespace chtest {

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;

double gaussian_log_pdf(double y, double mean, double var) {
  const double d = y - mean;
  return -0.5 * (kLogTwoPi + std::log(var) + d * d / var);
}

/// Per-record sums shared by every hypothesis; the hypothesis-specific part
/// of a projection only touches the k support coordinates.
struct RecordStats {
  const Eigen::VectorXd* a;
  double y;
  double sum_a;
  double sum_a2;
};

std::vector<RecordStats> precompute(const ObservationSet& obs) {
  std::vector<RecordStats> stats;
  stats.reserve(obs.records.size());
  for (const auto& r : obs.records) {
    RecordStats s{&r.vector, r.value, 0.0, 0.0};
    for (int i = 0; i < r.vector.size(); ++i) {
      s.sum_a += r.vector(i);
      s.sum_a2 += r.vector(i) * r.vector(i);
    }
    stats.push_back(s);
  }
  return stats;
}

double log_likelihood_from_stats(const HypothesisSpace& space, const Hypothesis& h,
                                 const std::vector<RecordStats>& stats) {
  const double dmu = space.f2.mean - space.f1.mean;
  const double dvar = space.f2.var - space.f1.var;
  double ll = 0.0;
  for (const auto& s : stats) {
    double mean = space.f1.mean * s.sum_a;
    double var = space.f1.var * s.sum_a2;
    for (int i : h.support) {
      const double ai = (*s.a)(i);
      mean += dmu * ai;
      var += dvar * ai * ai;
    }
    if (var <= 0.0) {
      throw NumericError("log_likelihood: zero projected variance under a hypothesis");
    }
    ll += gaussian_log_pdf(s.y, mean, var);
  }
  return ll;
}

std::vector<double> all_log_likelihoods(const HypothesisSpace& space,
                                        const std::vector<Hypothesis>& hypotheses,
                                        const ObservationSet& obs) {
  const auto stats = precompute(obs);
  std::vector<double> ll(hypotheses.size());
  for (std::size_t v = 0; v < hypotheses.size(); ++v) {
    ll[v] = log_likelihood_from_stats(space, hypotheses[v], stats);
  }
  return ll;
}

void check_inputs(const HypothesisSpace& space, const ObservationSet& obs) {
  space.validate();
  obs.validate();
  if (obs.dim() != space.n) throw ConfigError("observations do not match the space dimension");
}

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

double logistic(double log_odds) { return 1.0 / (1.0 + std::exp(-log_odds)); }

}  // namespace

double log_likelihood(const HypothesisSpace& space, const Hypothesis& h,
                      const ObservationSet& obs) {
  check_inputs(space, obs);
  h.validate(space.n, space.k);
  return log_likelihood_from_stats(space, h, precompute(obs));
}

DetectionResult lrt_full(const HypothesisSpace& space, const ObservationSet& obs,
                         std::uint64_t cap) {
  check_inputs(space, obs);
  const auto hypotheses = enumerate_hypotheses(space.n, space.k, cap);
  DetectionResult out;
  out.scores = all_log_likelihoods(space, hypotheses, obs);
  std::size_t best = 0;
  for (std::size_t v = 1; v < out.scores.size(); ++v) {
    if (out.scores[v] > out.scores[best]) best = v;
  }
  for (std::size_t v = 0; v < out.scores.size(); ++v) {
    if (v != best && out.scores[v] == out.scores[best]) {
      out.tie = true;
      break;
    }
  }
  out.decision = hypotheses[best];  // enumeration order is lexicographic
  return out;
}

DetectionResult pairwise_np(const HypothesisSpace& space, const ObservationSet& obs,
                            std::uint64_t cap) {
  check_inputs(space, obs);
  const auto hypotheses = enumerate_hypotheses(space.n, space.k, cap);
  DetectionResult out;
  out.scores = all_log_likelihoods(space, hypotheses, obs);
  // Each pairwise Neyman-Pearson test at threshold 0 is decided by the sign
  // of the log-likelihood difference, so a hypothesis wins all its matches
  // iff it is the unique strict maximum.
  std::size_t best = 0;
  for (std::size_t v = 1; v < out.scores.size(); ++v) {
    if (out.scores[v] > out.scores[best]) best = v;
  }
  bool unique = true;
  for (std::size_t v = 0; v < out.scores.size(); ++v) {
    if (v != best && out.scores[v] == out.scores[best]) {
      unique = false;
      break;
    }
  }
  if (unique) out.decision = hypotheses[best];
  return out;
}

LassoResult lasso_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double lambda,
                        double tol, int max_sweeps, std::vector<double>* objective_trace) {
  if (a.rows() != y.size()) throw ConfigError("lasso_solve: row count mismatch");
  if (lambda < 0.0) throw ConfigError("lasso_solve: lambda must be nonnegative");
  const int n = static_cast<int>(a.cols());

  Eigen::VectorXd col_sq(n);
  for (int i = 0; i < n; ++i) col_sq(i) = a.col(i).squaredNorm();

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = y;
  if (objective_trace) objective_trace->clear();

  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (int i = 0; i < n; ++i) {
      if (col_sq(i) == 0.0) continue;
      const double rho = a.col(i).dot(r) + col_sq(i) * x(i);
      const double xi = soft_threshold(rho, lambda) / col_sq(i);
      const double change = xi - x(i);
      if (change != 0.0) {
        r -= a.col(i) * change;
        x(i) = xi;
        max_change = std::max(max_change, std::abs(change));
      }
    }
    if (objective_trace) {
      objective_trace->push_back(0.5 * r.squaredNorm() + lambda * x.lpNorm<1>());
    }
    if (max_change < tol) return {std::move(x), sweep};
  }
  std::ostringstream msg;
  msg << "lasso_solve: no convergence within " << max_sweeps << " sweeps";
  throw IterationLimit(msg.str(), x);
}

double lasso_default_lambda(const Eigen::MatrixXd& a, double sigma) {
  double max_norm = 0.0;
  for (int i = 0; i < a.cols(); ++i) max_norm = std::max(max_norm, a.col(i).norm());
  return sigma * std::sqrt(2.0 * std::log(static_cast<double>(a.cols()))) * max_norm;
}

DetectionResult lasso_detect(const HypothesisSpace& space, const ObservationSet& obs,
                             double lambda) {
  check_inputs(space, obs);
  if (std::abs(space.f2.mean - space.f1.mean) <= 0.0) {
    throw ConfigError("lasso_detect: anomaly must be distinguished by its mean");
  }
  const int m = obs.size();
  Eigen::MatrixXd a(m, space.n);
  Eigen::VectorXd y(m);
  for (int j = 0; j < m; ++j) {
    a.row(j) = obs.records[j].vector;
    y(j) = obs.records[j].value;
  }
  // Center by the all-normal baseline so anomalies carry the signal.
  y -= a.rowwise().sum() * space.f1.mean;
  if (lambda <= 0.0) lambda = lasso_default_lambda(a, std::sqrt(space.f1.var));

  auto solved = lasso_solve(a, y, lambda);

  std::vector<int> order(space.n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int lhs, int rhs) {
    return std::abs(solved.x(lhs)) > std::abs(solved.x(rhs));
  });
  Hypothesis h;
  h.support.assign(order.begin(), order.begin() + space.k);
  std::sort(h.support.begin(), h.support.end());

  DetectionResult out;
  out.decision = std::move(h);
  out.scores.assign(solved.x.data(), solved.x.data() + space.n);
  out.iterations = solved.sweeps;
  return out;
}

FactorGraph FactorGraph::from_observations(const ObservationSet& obs, int max_check_degree) {
  FactorGraph g;
  g.n_vars = obs.dim();
  g.n_checks = obs.size();
  g.var_checks.resize(g.n_vars);
  g.check_vars.resize(g.n_checks);
  for (int j = 0; j < g.n_checks; ++j) {
    const Eigen::VectorXd& a = obs.records[j].vector;
    for (int i = 0; i < g.n_vars; ++i) {
      if (std::abs(a(i)) <= 1e-12) continue;
      if (std::abs(a(i) - 1.0) > 1e-12) {
        throw ConfigError("mp_detect: sensing vectors must be 0/1-valued");
      }
      g.check_vars[j].push_back(i);
      g.var_checks[i].push_back(j);
    }
    if (static_cast<int>(g.check_vars[j].size()) > max_check_degree) {
      std::ostringstream msg;
      msg << "mp_detect: check degree " << g.check_vars[j].size() << " exceeds the enumeration bound "
          << max_check_degree;
      throw ConfigError(msg.str());
    }
  }
  return g;
}

DetectionResult mp_detect(const HypothesisSpace& space, const ObservationSet& obs,
                          const MpOptions& options) {
  check_inputs(space, obs);
  const FactorGraph graph = FactorGraph::from_observations(obs);
  const double prior =
      options.prior > 0.0 ? options.prior : static_cast<double>(space.k) / space.n;
  const double prior_log_odds = std::log(prior / (1.0 - prior));
  const auto clamp = [&](double v) { return std::clamp(v, -options.clamp, options.clamp); };

  // Edge storage: messages indexed per check by neighbor position.
  std::vector<std::vector<double>> check_to_var(graph.n_checks);
  for (int j = 0; j < graph.n_checks; ++j) {
    check_to_var[j].assign(graph.check_vars[j].size(), 0.0);
  }
  // var_sum[i] = sum of incoming check messages at variable i.
  std::vector<double> var_sum(graph.n_vars, 0.0);

  const auto refresh_var_sums = [&] {
    std::fill(var_sum.begin(), var_sum.end(), 0.0);
    for (int j = 0; j < graph.n_checks; ++j) {
      for (std::size_t t = 0; t < graph.check_vars[j].size(); ++t) {
        var_sum[graph.check_vars[j][t]] += check_to_var[j][t];
      }
    }
  };

  int iterations = 0;
  bool converged = false;
  std::vector<double> weight, next_weight;
  for (; iterations < options.max_iters; ++iterations) {
    refresh_var_sums();
    double max_change = 0.0;
    std::vector<std::vector<double>> updated = check_to_var;
    for (int j = 0; j < graph.n_checks; ++j) {
      const auto& vars = graph.check_vars[j];
      const int degree = static_cast<int>(vars.size());
      const double yj = obs.records[j].value;
      for (int t = 0; t < degree; ++t) {
        // Distribution of the abnormal count among the other neighbors,
        // from their incoming variable-to-check probabilities.
        weight.assign(1, 1.0);
        for (int u = 0; u < degree; ++u) {
          if (u == t) continue;
          const double msg =
              clamp(prior_log_odds + var_sum[vars[u]] - check_to_var[j][u]);
          const double q = logistic(msg);
          next_weight.assign(weight.size() + 1, 0.0);
          for (std::size_t c = 0; c < weight.size(); ++c) {
            next_weight[c] += weight[c] * (1.0 - q);
            next_weight[c + 1] += weight[c] * q;
          }
          weight.swap(next_weight);
        }
        // Likelihood of y_j given X_t's state: the sum of the selected
        // mixture components is Gaussian with additive means/variances.
        double like[2];
        for (int s = 0; s < 2; ++s) {
          double best = -std::numeric_limits<double>::infinity();
          std::vector<double> terms;
          terms.reserve(weight.size());
          for (std::size_t c = 0; c < weight.size(); ++c) {
            if (weight[c] <= 0.0) {
              terms.push_back(-std::numeric_limits<double>::infinity());
              continue;
            }
            const double abnormal = static_cast<double>(c) + s;
            const double normal = degree - abnormal;
            const double mean = abnormal * space.f2.mean + normal * space.f1.mean;
            const double var = abnormal * space.f2.var + normal * space.f1.var;
            const double term = std::log(weight[c]) + gaussian_log_pdf(yj, mean, var);
            terms.push_back(term);
            best = std::max(best, term);
          }
          double acc = 0.0;
          for (double term : terms) acc += std::exp(term - best);
          like[s] = best + std::log(acc);
        }
        const double update = like[1] - like[0];
        updated[j][t] =
            clamp(options.damping * update + (1.0 - options.damping) * check_to_var[j][t]);
        max_change = std::max(max_change, std::abs(updated[j][t] - check_to_var[j][t]));
      }
    }
    check_to_var.swap(updated);
    if (max_change < options.tol) {
      ++iterations;
      converged = true;
      break;
    }
  }

  refresh_var_sums();
  DetectionResult out;
  out.iterations = iterations;
  out.converged = converged;
  out.scores.resize(graph.n_vars);
  for (int i = 0; i < graph.n_vars; ++i) {
    out.scores[i] = logistic(prior_log_odds + var_sum[i]);
  }
  std::vector<int> order(graph.n_vars);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int lhs, int rhs) { return out.scores[lhs] > out.scores[rhs]; });
  Hypothesis h;
  h.support.assign(order.begin(), order.begin() + space.k);
  std::sort(h.support.begin(), h.support.end());
  out.decision = std::move(h);
  return out;
}

std::vector<double> mp_exact_posterior(const HypothesisSpace& space, const ObservationSet& obs,
                                       std::uint64_t cap) {
  check_inputs(space, obs);
  const auto hypotheses = enumerate_hypotheses(space.n, space.k, cap);
  const auto ll = all_log_likelihoods(space, hypotheses, obs);
  const double best = *std::max_element(ll.begin(), ll.end());
  std::vector<double> posterior(hypotheses.size());
  double norm = 0.0;
  for (std::size_t v = 0; v < ll.size(); ++v) {
    posterior[v] = std::exp(ll[v] - best);
    norm += posterior[v];
  }
  std::vector<double> marginals(space.n, 0.0);
  for (std::size_t v = 0; v < hypotheses.size(); ++v) {
    const double p = posterior[v] / norm;
    for (int i : hypotheses[v].support) marginals[i] += p;
  }
  return marginals;
}

}  // namespace chtest
