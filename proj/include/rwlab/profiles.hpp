#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include "rwlab/error.hpp"
#include "rwlab/point_set.hpp"

namespace rwlab {

/// Relative slack used whenever a subset's size fraction is compared with a
/// threshold, so that sets sitting exactly on the threshold in real
/// arithmetic are not lost to rounding.
inline constexpr double kFractionSlack = 1e-12;

enum class ProfileKind { standard, hybrid };

/// How values between grid points are interpreted.
enum class StepConvention {
  /// Values known only at the grid points; between t_k and t_{k+1} the
  /// profile is bounded below by the value at t_{k+1}.
  sampled,
  /// Exact right-continuous staircase: value[k] holds on [t_k, t_{k+1}) and
  /// the last value holds from the last breakpoint on.
  staircase,
};

/// Isoperimetric profile phi(t) (standard, any model) or hybrid profile
/// psi(t) (model-3 conductance, counting constraint). +inf marks grid points
/// with no admissible set.
struct IsoProfile {
  std::vector<double> grid;
  std::vector<double> values;
  ProfileKind kind = ProfileKind::standard;
  int model = 1;
  StepConvention convention = StepConvention::sampled;

  /// Value at t under the profile's step convention.
  [[nodiscard]] double at(double t) const {
    if (grid.empty() || t < grid.front()) return std::numeric_limits<double>::infinity();
    if (convention == StepConvention::staircase) {
      const auto it = std::upper_bound(grid.begin(), grid.end(), t);
      return values[static_cast<std::size_t>(it - grid.begin()) - 1];
    }
    const auto it = std::lower_bound(grid.begin(), grid.end(), t);
    if (it == grid.end()) return values.back();
    return values[static_cast<std::size_t>(it - grid.begin())];
  }
};

/// CSV "t,phi"; +inf written as "inf".
inline void write_profile_csv(std::ostream& out, const IsoProfile& p) {
  out << "t,phi\n";
  for (std::size_t k = 0; k < p.grid.size(); ++k) {
    out << detail::format_g17(p.grid[k]) << ',' << detail::format_g17(p.values[k]) << '\n';
  }
}

/// Spectral profile Lambda(r): right-continuous nonincreasing step function.
/// `complete` is set when the full vertex set is among the admissible sets,
/// i.e. the last step is exact for all larger r.
struct SpectralProfile {
  std::vector<double> breakpoints;
  std::vector<double> values;
  bool complete = false;

  [[nodiscard]] double at(double r) const {
    if (breakpoints.empty() || r < breakpoints.front() * (1.0 - kFractionSlack)) {
      return std::numeric_limits<double>::infinity();
    }
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), r * (1.0 + kFractionSlack));
    return values[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
  }
};

}  // namespace rwlab
