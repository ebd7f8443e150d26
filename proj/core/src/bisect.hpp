#pragma once

#include <cmath>

namespace treegibbs::detail {

/// Root of a continuous fn on [lo, hi] with fn(lo) and fn(hi) of opposite
/// sign. Halves until the bracket cannot shrink in double precision.
template <class Fn>
double bisect(Fn&& fn, double lo, double hi) {
  double flo = fn(lo);
  if (flo == 0.0) return lo;
  if (fn(hi) == 0.0) return hi;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = fn(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  // Return whichever end has the smaller residual.
  return std::abs(fn(lo)) <= std::abs(fn(hi)) ? lo : hi;
}

}  // namespace treegibbs::detail
