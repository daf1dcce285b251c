#pragma once

#include <cstdint>
#include <vector>

#include "chtest/gaussian.hpp"

namespace chtest {

constexpr std::uint64_t kDefaultHypothesisCap = 1'000'000;

/// Support set of the k anomalous variables; indices strictly increasing.
struct Hypothesis {
  std::vector<int> support;

  bool contains(int i) const;
  bool operator==(const Hypothesis& other) const { return support == other.support; }
  void validate(int n, int k) const;
};

/// The anomaly-detection instance: n independent variables, k of them
/// following the abnormal distribution f2 instead of the normal f1.
struct HypothesisSpace {
  int n = 0;
  int k = 0;
  ScalarGaussian f1;  // normal
  ScalarGaussian f2;  // abnormal

  void validate() const;
  std::uint64_t hypothesis_count(std::uint64_t cap = kDefaultHypothesisCap) const;
};

/// All C(n,k) supports in lexicographic order.
std::vector<Hypothesis> enumerate_hypotheses(int n, int k,
                                             std::uint64_t cap = kDefaultHypothesisCap);

/// Joint distribution of the n variables under a hypothesis: independent
/// scalars, so the covariance is diagonal.
Gaussian hypothesis_moments(const HypothesisSpace& space, const Hypothesis& h);

}  // namespace chtest
