#pragma once

#include <algorithm>
#include <cmath>

namespace papdiff::detail {

// Central-difference step, scaled to the coordinate.
inline double fd_step(double xi) { return 1e-5 * std::max(1.0, std::abs(xi)); }

// |a - b| relative to max(1, |a|, |b|).
inline double rel_err(double a, double b) {
  const double diff = std::abs(a - b);
  return diff / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace papdiff::detail
