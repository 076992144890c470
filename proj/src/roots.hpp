#pragma once

#include <cmath>
#include <utility>

namespace lbr::detail {

// Root of an increasing function on a bracket with f(lo) <= target <= f(hi).
// `f` returns (value, derivative). Newton steps are taken when they stay inside
// the current bracket, bisection otherwise; stops at relative step 1e-13.
template <class F>
double solve_increasing(F&& f, double target, double lo, double hi) {
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 500; ++it) {
    const auto [value, slope] = f(x);
    const double r = value - target;
    if (r == 0) return x;
    if (r < 0)
      lo = x;
    else
      hi = x;
    double next = slope > 0 && std::isfinite(slope) ? x - r / slope : lo - 1;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double tol = 1e-13 * std::max(std::abs(next), 1e-300);
    if (std::abs(next - x) <= tol || hi - lo <= tol) return next;
    x = next;
  }
  return x;
}

}  // namespace lbr::detail
