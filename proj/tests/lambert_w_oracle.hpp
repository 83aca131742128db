#pragma once

// Independent bisection solver for w e^w = x; test-only reference for the Halley implementation.

#include <cmath>

namespace rach::testing {

/// Principal branch: w in [-1, hi]. Lower branch: w in [lo, -1].
inline double lambert_w_bisect(double x, bool principal) {
  double lo, hi;
  if (principal) {
    lo = -1.0;
    hi = std::max(1.0, std::log1p(std::max(x, 0.0)) + 1.0);
  } else {
    lo = -800.0;
    hi = -1.0;
  }
  const auto f = [x](double w) { return w * std::exp(w) - x; };
  // On the principal branch f increases; on the lower branch it decreases.
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const bool below = f(mid) < 0.0;
    if (principal == below) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace rach::testing
