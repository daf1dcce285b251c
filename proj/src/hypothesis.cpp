#include "chtest/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chtest/errors.hpp"
#include "chtest/numeric.hpp"

namespace chtest {

bool Hypothesis::contains(int i) const {
  return std::binary_search(support.begin(), support.end(), i);
}

void Hypothesis::validate(int n, int k) const {
  if (static_cast<int>(support.size()) != k) {
    throw ConfigError("Hypothesis: support size does not equal k");
  }
  int prev = -1;
  for (int i : support) {
    if (i <= prev || i < 0 || i >= n) {
      throw ConfigError("Hypothesis: support must be strictly increasing within [0, n)");
    }
    prev = i;
  }
}

void HypothesisSpace::validate() const {
  if (k < 1 || k >= n) throw ConfigError("HypothesisSpace: requires 1 <= k < n");
  f1.validate();
  f2.validate();
  if (same_distribution(f1, f2)) {
    throw ConfigError("HypothesisSpace: f1 and f2 must differ in mean or variance");
  }
}

std::uint64_t HypothesisSpace::hypothesis_count(std::uint64_t cap) const {
  return binomial_capped(n, k, cap);
}

std::vector<Hypothesis> enumerate_hypotheses(int n, int k, std::uint64_t cap) {
  if (k < 1 || k >= n) throw ConfigError("enumerate_hypotheses: requires 1 <= k < n");
  const std::uint64_t count = binomial_capped(n, k, cap);
  std::vector<Hypothesis> out;
  out.reserve(count);
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    out.push_back(Hypothesis{idx});
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

Gaussian hypothesis_moments(const HypothesisSpace& space, const Hypothesis& h) {
  space.validate();
  h.validate(space.n, space.k);
  Eigen::VectorXd mean = Eigen::VectorXd::Constant(space.n, space.f1.mean);
  Eigen::VectorXd var = Eigen::VectorXd::Constant(space.n, space.f1.var);
  for (int i : h.support) {
    mean(i) = space.f2.mean;
    var(i) = space.f2.var;
  }
  return Gaussian::diagonal(std::move(mean), std::move(var));
}

}  // namespace chtest
