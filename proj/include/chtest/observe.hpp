#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "chtest/hypothesis.hpp"
#include "chtest/rng.hpp"

namespace chtest {

/// Discrete distribution over sensing vectors. Atoms with probability zero
/// are tolerated and ignored by divergence computations.
struct SensingEnsemble {
  std::vector<Eigen::VectorXd> vectors;
  std::vector<double> probabilities;

  int dim() const;
  void validate() const;  // equal lengths, nonempty, probs >= 0 summing to 1
};

/// One of the three measurement modes: a fixed vector reused at every time
/// index, a vector drawn per index from a discrete ensemble, or a
/// predetermined schedule cycled over the time indices.
class SensingStrategy {
public:
  enum class Kind { Fixed, Random, Schedule };

  static SensingStrategy fixed(Eigen::VectorXd v);
  static SensingStrategy random(SensingEnsemble e);
  static SensingStrategy schedule(std::vector<Eigen::VectorXd> vectors);

  Kind kind() const { return kind_; }
  int dim() const;
  void validate() const;

  const std::vector<Eigen::VectorXd>& schedule_vectors() const { return vectors_; }
  const SensingEnsemble& ensemble() const { return ensemble_; }

  /// Vector used at a given time index; Random draws from `rng`.
  const Eigen::VectorXd& vector_for(int time_index, Rng& rng) const;

  /// The ensemble of sensing vectors this strategy realizes: a fixed vector
  /// is a single atom, a schedule weights each distinct vector by its cycle
  /// frequency. Used for error-exponent planning.
  SensingEnsemble as_ensemble() const;

private:
  Kind kind_ = Kind::Fixed;
  std::vector<Eigen::VectorXd> vectors_;
  SensingEnsemble ensemble_;
};

struct ObservationRecord {
  Eigen::VectorXd vector;
  double value = 0.0;
};

/// Ordered (sensing vector, measurement) pairs for one trial.
struct ObservationSet {
  std::vector<ObservationRecord> records;

  int size() const { return static_cast<int>(records.size()); }
  int dim() const;
  void validate() const;  // m >= 1, consistent dimensions
};

/// Draws m observations under hypothesis `h`: fresh realizations of all n
/// variables at each time index, vectors per the strategy. Bit-reproducible
/// for a given seed.
ObservationSet sample_trial(const HypothesisSpace& space, const Hypothesis& h,
                            const SensingStrategy& strategy, int m, std::uint64_t seed);

}  // namespace chtest
