#pragma once

#include <cstddef>

namespace bms {

struct Bracket {
  double lo;
  double hi;
  double mid() const noexcept { return 0.5 * (lo + hi); }
};

/// Bisection for f(x) = target with f nondecreasing on [lo, hi] and
/// f(lo) <= target <= f(hi). Stops once hi - lo <= tol.
template <class F>
Bracket bisect_increasing(F&& f, double target, double lo, double hi, double tol) {
  for (std::size_t iter = 0; iter < 400 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

}  // namespace bms
