#include "chtest/numeric.hpp"

#include <cmath>
#include <sstream>

#include "chtest/errors.hpp"

namespace chtest {

namespace {

constexpr double kInvPhi = 0.6180339887498949;  // 1/golden ratio

double simpson_estimate(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_recurse(const std::function<double(double)>& f, double a, double b, double fa,
                       double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  if (!std::isfinite(flm) || !std::isfinite(frm)) {
    std::ostringstream msg;
    msg << "adaptive_simpson: non-finite integrand on [" << a << ", " << b << "]";
    throw NumericError(msg.str());
  }
  const double left = simpson_estimate(fa, flm, fm, m - a);
  const double right = simpson_estimate(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  if (depth <= 0) {
    std::ostringstream msg;
    msg << "adaptive_simpson: tolerance " << tol << " not reached on [" << a << ", " << b
        << "], residual " << std::abs(delta);
    throw NumericError(msg.str());
  }
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

MaximizeResult maximize_on_unit_interval(const std::function<double(double)>& f, int grid_points,
                                         double xtol) {
  if (grid_points < 3) grid_points = 3;
  MaximizeResult best{0.0, f(0.0)};
  int best_idx = 0;
  for (int i = 1; i < grid_points; ++i) {
    const double x = static_cast<double>(i) / (grid_points - 1);
    const double v = f(x);
    if (v > best.value) {
      best = {x, v};
      best_idx = i;
    }
  }
  const double step = 1.0 / (grid_points - 1);
  double a = std::max(0.0, (best_idx - 1) * step);
  double b = std::min(1.0, (best_idx + 1) * step);

  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > xtol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
    const double x = fc > fd ? c : d;
    const double v = fc > fd ? fc : fd;
    if (v > best.value) best = {x, v};
  }
  return best;
}

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double abs_tol, int max_depth) {
  if (!(hi > lo)) throw ConfigError("adaptive_simpson: empty interval");
  const double fa = f(lo);
  const double fb = f(hi);
  const double m = 0.5 * (lo + hi);
  const double fm = f(m);
  if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm)) {
    throw NumericError("adaptive_simpson: non-finite integrand at initial nodes");
  }
  const double whole = simpson_estimate(fa, fm, fb, hi - lo);
  return simpson_recurse(f, lo, hi, fa, fm, fb, whole, abs_tol, max_depth);
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) throw ConfigError("log_binomial: k out of range");
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

std::uint64_t binomial_capped(int n, int k, std::uint64_t cap) {
  if (k < 0 || k > n) throw ConfigError("binomial_capped: k out of range");
  k = std::min(k, n - k);
  // Detect overflow through the log value before multiplying.
  if (log_binomial(n, k) > std::log(static_cast<double>(cap)) + 1.0) {
    std::ostringstream msg;
    msg << "C(" << n << ", " << k << ") ~ 10^" << log_binomial(n, k) / std::log(10.0)
        << " exceeds cap " << cap;
    throw CombinatorialOverflow(msg.str());
  }
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;  // exact: product of i consecutive integers divides by i!
  }
  if (c > cap) {
    std::ostringstream msg;
    msg << "C(" << n << ", " << k << ") = " << c << " exceeds cap " << cap;
    throw CombinatorialOverflow(msg.str());
  }
  return c;
}

WilsonInterval wilson_interval(int successes, int trials) {
  if (trials <= 0 || successes < 0 || successes > trials) {
    throw ConfigError("wilson_interval: invalid counts");
  }
  const double z = 1.959963984540054;
  const double n = trials;
  const double p = successes / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  WilsonInterval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (successes == 0) ci.low = 0.0;
  if (successes == trials) ci.high = 1.0;
  return ci;
}

}  // namespace chtest
