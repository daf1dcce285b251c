#include "chtest/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "chtest/errors.hpp"
#include "chtest/rng.hpp"

namespace chtest {

namespace {

// Seed derivation tags; arbitrary distinct constants.
constexpr std::uint64_t kSupportTag = 0x5u;
constexpr std::uint64_t kDesignTag = 0xDu;
constexpr std::uint64_t kObservationTag = 0x0B5u;
constexpr std::uint64_t kPairedTag = 0x9A17EDu;

std::uint64_t trial_seed(const ScenarioConfig& config, int m, const std::string& label,
                         int trial_index) {
  std::uint64_t s = mix_seed(config.base_seed, hash_string(label));
  s = mix_seed(s, static_cast<std::uint64_t>(m));
  return mix_seed(s, static_cast<std::uint64_t>(trial_index));
}

Hypothesis draw_support(int n, int k, std::uint64_t seed) {
  Rng rng(seed);
  // Partial Fisher-Yates over [0, n).
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  Hypothesis h;
  h.support.reserve(k);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.uniform_below(n - i));
    std::swap(perm[i], perm[j]);
    h.support.push_back(perm[i]);
  }
  std::sort(h.support.begin(), h.support.end());
  return h;
}

DetectionResult dispatch(const HypothesisSpace& space, const ObservationSet& obs,
                         const DetectorSpec& detector) {
  if (detector.method == "lrt") return lrt_full(space, obs);
  if (detector.method == "pairwise") return pairwise_np(space, obs);
  if (detector.method == "lasso") return lasso_detect(space, obs, detector.lasso_lambda);
  if (detector.method == "mp") return mp_detect(space, obs, detector.mp);
  throw ConfigError("unknown detector method: " + detector.method);
}

/// Runs fn(i) for i in [0, count) on a small worker pool; each index writes
/// only its own slot, so the aggregate is schedule-independent.
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double sign_test_p_value(int wins_a, int wins_b) {
  const int n = wins_a + wins_b;
  if (n == 0) return 1.0;
  const int x = std::min(wins_a, wins_b);
  // Two-sided exact binomial tail, log-space for large n.
  double tail = 0.0;
  for (int i = 0; i <= x; ++i) {
    tail += std::exp(log_binomial(n, i) - n * std::log(2.0));
  }
  return std::min(1.0, 2.0 * tail);
}

struct TrialContext {
  Hypothesis truth;
  SensingStrategy strategy;
  ObservationSet obs;
};

TrialContext build_trial(const ScenarioConfig& config, const StrategySpec& spec, int m,
                         std::uint64_t seed, std::uint64_t design_seed) {
  TrialContext ctx;
  ctx.truth = draw_support(config.n, config.k, mix_seed(seed, kSupportTag));
  ctx.strategy = spec.realize(config.n, m, design_seed);
  ctx.obs = sample_trial(config.space(), ctx.truth, ctx.strategy, m,
                         mix_seed(seed, kObservationTag));
  return ctx;
}

}  // namespace

SensingStrategy StrategySpec::realize(int n, int m, std::uint64_t seed) const {
  switch (kind) {
    case Kind::Fixed:
      return SensingStrategy::fixed(fixed_vector);
    case Kind::Ensemble:
      return SensingStrategy::random(ensemble);
    case Kind::Schedule:
      return SensingStrategy::schedule(schedule);
    case Kind::Bipartite:
      return sparse_bipartite(n, m, degree, seed, near_regular).as_schedule();
    case Kind::Separate:
      return separate_baseline(n, m, seed);
    case Kind::Hamming74:
      if (n != 7) throw ConfigError("hamming74 strategy requires n = 7");
      return SensingStrategy::schedule(hamming74_rows());
  }
  throw ConfigError("StrategySpec: invalid kind");
}

SensingEnsemble StrategySpec::planning_ensemble(int n, int m, std::uint64_t seed) const {
  return realize(n, m, seed).as_ensemble();
}

std::string StrategySpec::kind_name() const {
  switch (kind) {
    case Kind::Fixed: return "fixed";
    case Kind::Ensemble: return "ensemble";
    case Kind::Schedule: return "schedule";
    case Kind::Bipartite: return "bipartite";
    case Kind::Separate: return "separate";
    case Kind::Hamming74: return "hamming74";
  }
  return "?";
}

void StrategySpec::validate(int n) const {
  switch (kind) {
    case Kind::Fixed:
      if (fixed_vector.size() != n) throw ConfigError("fixed strategy: wrong dimension");
      return;
    case Kind::Ensemble:
      ensemble.validate();
      if (ensemble.dim() != n) throw ConfigError("ensemble strategy: wrong dimension");
      return;
    case Kind::Schedule:
      if (schedule.empty()) throw ConfigError("schedule strategy: empty schedule");
      for (const auto& v : schedule) {
        if (v.size() != n) throw ConfigError("schedule strategy: wrong dimension");
      }
      return;
    case Kind::Bipartite:
      if (degree < 1 || degree > n) throw ConfigError("bipartite strategy: bad degree");
      return;
    case Kind::Separate:
      return;
    case Kind::Hamming74:
      if (n != 7) throw ConfigError("hamming74 strategy requires n = 7");
      return;
  }
  throw ConfigError("StrategySpec: invalid kind");
}

void DetectorSpec::validate() const {
  if (method != "lrt" && method != "pairwise" && method != "lasso" && method != "mp") {
    throw ConfigError("unknown detector method: " + method);
  }
}

void ScenarioConfig::validate() const {
  space().validate();
  strategy.validate(n);
  if (detectors.empty()) throw ConfigError("ScenarioConfig: needs at least one detector");
  for (const auto& d : detectors) {
    d.validate();
    if (d.strategy) d.strategy->validate(n);
  }
  if (m_values.empty()) throw ConfigError("ScenarioConfig: needs at least one m value");
  for (std::size_t i = 0; i < m_values.size(); ++i) {
    if (m_values[i] < 1 || (i > 0 && m_values[i] <= m_values[i - 1])) {
      throw ConfigError("ScenarioConfig: m_values must be positive and strictly increasing");
    }
  }
  if (trials < 1) throw ConfigError("ScenarioConfig: trials must be >= 1");
}

bool run_trial(const ScenarioConfig& config, int m, const DetectorSpec& detector,
               int trial_index) {
  const StrategySpec& spec = detector.strategy ? *detector.strategy : config.strategy;
  const std::uint64_t seed = trial_seed(config, m, detector.name(), trial_index);
  const std::uint64_t design_seed =
      config.pin_design ? mix_seed(mix_seed(config.base_seed, kDesignTag), m)
                        : mix_seed(seed, kDesignTag);
  TrialContext ctx;
  try {
    ctx = build_trial(config, spec, m, seed, design_seed);
  } catch (const Error& e) {
    std::ostringstream msg;
    msg << "trial setup failed (m=" << m << ", detector=" << detector.name()
        << ", trial=" << trial_index << "): " << e.what();
    throw ConfigError(msg.str());
  }
  try {
    const DetectionResult result = dispatch(config.space(), ctx.obs, detector);
    return result.decision.has_value() && *result.decision == ctx.truth;
  } catch (const Error&) {
    return false;  // detector-level failure scores as an error
  }
}

ErrorCurve error_curve(const ScenarioConfig& config, int threads, std::ostream* progress) {
  config.validate();
  ErrorCurve curve;
  for (int m : config.m_values) {
    for (const auto& detector : config.detectors) {
      std::vector<std::uint8_t> correct(config.trials, 0);
      parallel_for(config.trials, threads,
                   [&](int t) { correct[t] = run_trial(config, m, detector, t) ? 1 : 0; });
      ErrorCurveRow row;
      row.m = m;
      row.detector = detector.name();
      row.trials = config.trials;
      row.errors = config.trials - static_cast<int>(std::count(correct.begin(), correct.end(), 1));
      row.error_prob = static_cast<double>(row.errors) / config.trials;
      const WilsonInterval ci = wilson_interval(row.errors, row.trials);
      row.ci_low = ci.low;
      row.ci_high = ci.high;
      curve.rows.push_back(row);
      if (progress) {
        *progress << "m=" << m << " detector=" << row.detector << " errors=" << row.errors << "/"
                  << row.trials << "\n";
      }
    }
  }
  return curve;
}

std::vector<PairedCompareRow> paired_compare(const ScenarioConfig& config,
                                             const DetectorSpec& detector_a,
                                             const DetectorSpec& detector_b, int threads) {
  config.validate();
  detector_a.validate();
  detector_b.validate();
  const StrategySpec& spec_a = detector_a.strategy ? *detector_a.strategy : config.strategy;
  const StrategySpec& spec_b = detector_b.strategy ? *detector_b.strategy : config.strategy;
  const bool shared_strategy = spec_a.kind == spec_b.kind && spec_a.degree == spec_b.degree &&
                               spec_a.near_regular == spec_b.near_regular;

  std::vector<PairedCompareRow> rows;
  for (int m : config.m_values) {
    std::vector<std::uint8_t> outcome_a(config.trials, 0), outcome_b(config.trials, 0);
    parallel_for(config.trials, threads, [&](int t) {
      std::uint64_t seed = mix_seed(config.base_seed, kPairedTag);
      seed = mix_seed(seed, static_cast<std::uint64_t>(m));
      seed = mix_seed(seed, static_cast<std::uint64_t>(t));
      const std::uint64_t design_seed = mix_seed(seed, kDesignTag);
      const auto run_one = [&](const DetectorSpec& det, const StrategySpec& spec,
                               std::uint64_t obs_salt) {
        Hypothesis truth = draw_support(config.n, config.k, mix_seed(seed, kSupportTag));
        SensingStrategy strategy = spec.realize(config.n, m, design_seed);
        ObservationSet obs = sample_trial(config.space(), truth, strategy, m,
                                          mix_seed(mix_seed(seed, kObservationTag), obs_salt));
        try {
          const DetectionResult result = dispatch(config.space(), obs, det);
          return result.decision.has_value() && *result.decision == truth;
        } catch (const Error&) {
          return false;
        }
      };
      // Same observations when the strategies agree, same support otherwise.
      outcome_a[t] = run_one(detector_a, spec_a, shared_strategy ? 0 : 1) ? 1 : 0;
      outcome_b[t] = run_one(detector_b, spec_b, shared_strategy ? 0 : 2) ? 1 : 0;
    });
    PairedCompareRow row;
    row.m = m;
    for (int t = 0; t < config.trials; ++t) {
      if (outcome_a[t] && outcome_b[t]) ++row.both_correct;
      else if (outcome_a[t]) ++row.wins_a;
      else if (outcome_b[t]) ++row.wins_b;
      else ++row.both_wrong;
    }
    row.p_value = sign_test_p_value(row.wins_a, row.wins_b);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace chtest
