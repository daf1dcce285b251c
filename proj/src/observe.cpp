#include "chtest/observe.hpp"

#include <cmath>
#include <map>
#include <vector>

#include "chtest/errors.hpp"

namespace chtest {

int SensingEnsemble::dim() const {
  return vectors.empty() ? 0 : static_cast<int>(vectors.front().size());
}

void SensingEnsemble::validate() const {
  if (vectors.empty() || vectors.size() != probabilities.size()) {
    throw ConfigError("SensingEnsemble: vectors/probabilities must be nonempty, equal length");
  }
  const int d = dim();
  double sum = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != d) throw ConfigError("SensingEnsemble: inconsistent dimensions");
    if (!vectors[i].allFinite()) throw ConfigError("SensingEnsemble: non-finite vector");
    if (probabilities[i] < 0.0) throw ConfigError("SensingEnsemble: negative probability");
    sum += probabilities[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ConfigError("SensingEnsemble: probabilities must sum to 1");
  }
}

SensingStrategy SensingStrategy::fixed(Eigen::VectorXd v) {
  SensingStrategy s;
  s.kind_ = Kind::Fixed;
  s.vectors_.push_back(std::move(v));
  s.validate();
  return s;
}

SensingStrategy SensingStrategy::random(SensingEnsemble e) {
  SensingStrategy s;
  s.kind_ = Kind::Random;
  s.ensemble_ = std::move(e);
  s.validate();
  return s;
}

SensingStrategy SensingStrategy::schedule(std::vector<Eigen::VectorXd> vectors) {
  SensingStrategy s;
  s.kind_ = Kind::Schedule;
  s.vectors_ = std::move(vectors);
  s.validate();
  return s;
}

int SensingStrategy::dim() const {
  if (kind_ == Kind::Random) return ensemble_.dim();
  return vectors_.empty() ? 0 : static_cast<int>(vectors_.front().size());
}

void SensingStrategy::validate() const {
  if (kind_ == Kind::Random) {
    ensemble_.validate();
    return;
  }
  if (vectors_.empty()) throw ConfigError("SensingStrategy: empty schedule");
  const int d = dim();
  for (const auto& v : vectors_) {
    if (v.size() != d) throw ConfigError("SensingStrategy: inconsistent dimensions");
    if (v.isZero(0.0)) throw ConfigError("SensingStrategy: all-zero sensing vector");
    if (!v.allFinite()) throw ConfigError("SensingStrategy: non-finite vector");
  }
}

const Eigen::VectorXd& SensingStrategy::vector_for(int time_index, Rng& rng) const {
  switch (kind_) {
    case Kind::Fixed:
      return vectors_.front();
    case Kind::Schedule:
      return vectors_[time_index % vectors_.size()];
    case Kind::Random: {
      const double u = rng.uniform01();
      double acc = 0.0;
      for (std::size_t i = 0; i < ensemble_.probabilities.size(); ++i) {
        acc += ensemble_.probabilities[i];
        if (u < acc) return ensemble_.vectors[i];
      }
      return ensemble_.vectors.back();
    }
  }
  throw ConfigError("SensingStrategy: invalid kind");
}

SensingEnsemble SensingStrategy::as_ensemble() const {
  if (kind_ == Kind::Random) return ensemble_;
  SensingEnsemble e;
  if (kind_ == Kind::Fixed) {
    e.vectors = {vectors_.front()};
    e.probabilities = {1.0};
    return e;
  }
  // Schedule: weight distinct vectors by their frequency over one cycle.
  std::vector<int> counts;
  for (const auto& v : vectors_) {
    bool found = false;
    for (std::size_t i = 0; i < e.vectors.size(); ++i) {
      if (e.vectors[i] == v) {
        ++counts[i];
        found = true;
        break;
      }
    }
    if (!found) {
      e.vectors.push_back(v);
      counts.push_back(1);
    }
  }
  e.probabilities.resize(e.vectors.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    e.probabilities[i] = static_cast<double>(counts[i]) / vectors_.size();
  }
  return e;
}

int ObservationSet::dim() const {
  return records.empty() ? 0 : static_cast<int>(records.front().vector.size());
}

void ObservationSet::validate() const {
  if (records.empty()) throw ConfigError("ObservationSet: needs at least one record");
  const int d = dim();
  for (const auto& r : records) {
    if (r.vector.size() != d) throw ConfigError("ObservationSet: inconsistent dimensions");
  }
}

ObservationSet sample_trial(const HypothesisSpace& space, const Hypothesis& h,
                            const SensingStrategy& strategy, int m, std::uint64_t seed) {
  space.validate();
  h.validate(space.n, space.k);
  strategy.validate();
  if (strategy.dim() != space.n) {
    throw ConfigError("sample_trial: strategy dimension does not match n");
  }
  if (m < 1) throw ConfigError("sample_trial: m must be >= 1");

  Eigen::VectorXd mean = Eigen::VectorXd::Constant(space.n, space.f1.mean);
  Eigen::VectorXd sd = Eigen::VectorXd::Constant(space.n, std::sqrt(space.f1.var));
  for (int i : h.support) {
    mean(i) = space.f2.mean;
    sd(i) = std::sqrt(space.f2.var);
  }

  Rng rng(seed);
  ObservationSet obs;
  obs.records.reserve(m);
  Eigen::VectorXd x(space.n);
  for (int j = 0; j < m; ++j) {
    const Eigen::VectorXd& a = strategy.vector_for(j, rng);
    for (int i = 0; i < space.n; ++i) x(i) = mean(i) + sd(i) * rng.normal();
    obs.records.push_back({a, a.dot(x)});
  }
  return obs;
}

}  // namespace chtest
