#pragma once

#include <cmath>

namespace ibonset::detail {

// Phi(hi) - Phi(lo) for lo <= hi without cancellation in either tail.
inline double normal_interval(double lo, double hi) {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  if (lo >= 0.0) return 0.5 * (std::erfc(lo * inv_sqrt2) - std::erfc(hi * inv_sqrt2));
  if (hi <= 0.0) return 0.5 * (std::erfc(-hi * inv_sqrt2) - std::erfc(-lo * inv_sqrt2));
  return 1.0 - 0.5 * std::erfc(-lo * inv_sqrt2) - 0.5 * std::erfc(hi * inv_sqrt2);
}

}  // namespace ibonset::detail
