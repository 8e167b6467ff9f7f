#pragma once

#include <cmath>
#include <string>

#include "wgf/error.hpp"

namespace wgf {

struct Bracket {
  double lo;
  double hi;
};

/// Widens [lo, hi] geometrically about its center until f(lo) <= target <= f(hi)
/// for a nondecreasing f with f(±∞) = ±∞.
template <class F>
Bracket expand_bracket(F&& f, double target, double lo, double hi, int max_doublings = 200) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double center = 0.5 * (lo + hi);
  double half = 0.5 * (hi - lo);
  for (int k = 0; k < max_doublings; ++k) {
    const bool ok_lo = f(center - half) <= target;
    const bool ok_hi = f(center + half) >= target;
    if (ok_lo && ok_hi) return {center - half, center + half};
    half *= 2.0;
  }
  throw DomainError("no sign change found while bracketing target " + std::to_string(target));
}

/// Smallest x (to tolerance) with f(x) >= target, for nondecreasing f on a valid bracket.
/// tol = 0 bisects until the bracket endpoints are adjacent doubles.
template <class F>
double bisect_monotone(F&& f, double target, Bracket b, double tol = 0.0) {
  double lo = b.lo;
  double hi = b.hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace wgf
