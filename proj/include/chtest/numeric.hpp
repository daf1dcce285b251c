#pragma once

#include <cstdint>
#include <functional>

namespace chtest {

struct MaximizeResult {
  double x = 0.0;
  double value = 0.0;
};

/// Maximize a smooth unimodal function on [0,1]: coarse grid seed (the grid
/// guards against flat stretches), then golden-section to xtol. The reported
/// maximum is the best point ever evaluated, so it is never below any grid
/// value.
MaximizeResult maximize_on_unit_interval(const std::function<double(double)>& f,
                                         int grid_points = 101, double xtol = 1e-9);

/// Adaptive Simpson quadrature with absolute tolerance. Throws NumericError
/// when the recursion cannot reach the tolerance (non-convergent tail).
double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double abs_tol = 1e-10, int max_depth = 60);

/// log C(n,k) via lgamma; valid for n up to millions.
double log_binomial(int n, int k);

/// Exact C(n,k), throwing CombinatorialOverflow (naming the count) above cap.
std::uint64_t binomial_capped(int n, int k, std::uint64_t cap);

struct WilsonInterval {
  double low = 0.0;
  double high = 0.0;
};

/// Wilson 95% score interval for a binomial proportion.
WilsonInterval wilson_interval(int successes, int trials);

}  // namespace chtest
