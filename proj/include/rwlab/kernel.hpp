#pragma once

#include <cmath>

namespace rwlab {

/// exp(-r^alpha) from a squared distance.
inline double jump_rate(double dist2, double alpha) {
  if (alpha == 2.0) return std::exp(-dist2);
  if (alpha == 1.0) return std::exp(-std::sqrt(dist2));
  return std::exp(-std::pow(dist2, 0.5 * alpha));
}

}  // namespace rwlab
