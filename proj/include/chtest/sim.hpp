#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chtest/detect.hpp"
#include "chtest/design.hpp"
#include "chtest/numeric.hpp"
#include "chtest/observe.hpp"

namespace chtest {

/// Serializable generator for a sensing strategy. Bipartite designs are
/// regenerated per trial from the trial seed unless the scenario pins them.
struct StrategySpec {
  enum class Kind { Fixed, Ensemble, Schedule, Bipartite, Separate, Hamming74 };

  Kind kind = Kind::Separate;
  Eigen::VectorXd fixed_vector;
  SensingEnsemble ensemble;
  std::vector<Eigen::VectorXd> schedule;
  int degree = 6;
  bool near_regular = false;

  SensingStrategy realize(int n, int m, std::uint64_t seed) const;
  /// Ensemble view for exponent planning (bipartite realizes one design).
  SensingEnsemble planning_ensemble(int n, int m, std::uint64_t seed) const;
  std::string kind_name() const;
  void validate(int n) const;
};

struct DetectorSpec {
  std::string method;  // lrt | pairwise | lasso | mp
  std::string label;   // CSV label; defaults to method
  std::optional<StrategySpec> strategy;  // overrides the scenario strategy
  double lasso_lambda = 0.0;             // <= 0 selects the default penalty
  MpOptions mp;

  const std::string& name() const { return label.empty() ? method : label; }
  void validate() const;
};

/// One Monte Carlo experiment: error probability versus sample count for a
/// set of detectors under a sensing strategy.
struct ScenarioConfig {
  int n = 0;
  int k = 0;
  ScalarGaussian f1;
  ScalarGaussian f2;
  StrategySpec strategy;
  std::vector<DetectorSpec> detectors;
  std::vector<int> m_values;
  int trials = 0;
  std::uint64_t base_seed = 0;
  bool pin_design = false;

  HypothesisSpace space() const { return {n, k, f1, f2}; }
  void validate() const;
};

struct ErrorCurveRow {
  int m = 0;
  std::string detector;
  int trials = 0;
  int errors = 0;
  double error_prob = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct ErrorCurve {
  std::vector<ErrorCurveRow> rows;
};

/// One seeded trial: draw a uniform true support, realize the strategy,
/// sample observations, detect, compare. Failures and detector-level errors
/// count as incorrect.
bool run_trial(const ScenarioConfig& config, int m, const DetectorSpec& detector,
               int trial_index);

/// Full sweep over (m, detector); per-trial seeds depend only on
/// (base_seed, m, detector label, trial index), so results are identical for
/// any thread count. Progress lines go to `progress` when given.
ErrorCurve error_curve(const ScenarioConfig& config, int threads = 0,
                       std::ostream* progress = nullptr);

struct PairedCompareRow {
  int m = 0;
  int wins_a = 0;        // a correct, b wrong
  int wins_b = 0;        // b correct, a wrong
  int both_correct = 0;
  int both_wrong = 0;
  double p_value = 1.0;  // two-sided exact sign test on the discordant pairs
};

/// McNemar-style paired comparison: identical observation sets per trial
/// when both detectors use the same strategy, identical true supports
/// otherwise.
std::vector<PairedCompareRow> paired_compare(const ScenarioConfig& config,
                                             const DetectorSpec& detector_a,
                                             const DetectorSpec& detector_b, int threads = 0);

}  // namespace chtest
