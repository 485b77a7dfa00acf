#pragma once

// Random environments: homogeneous and inhomogeneous Poisson processes,
// thinned lattices, the good-box field and the local-density statistics
// R_A and S_ell.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rwlab/cell_grid.hpp"
#include "rwlab/error.hpp"
#include "rwlab/kernel.hpp"
#include "rwlab/point_set.hpp"
#include "rwlab/rng.hpp"

namespace rwlab {

namespace detail {

inline std::string num_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Stream identifiers; positions and thinning never share draws.
inline constexpr std::uint64_t kStreamPositions = 1;
inline constexpr std::uint64_t kStreamThinning = 2;

}  // namespace detail

/// Homogeneous Poisson process of intensity `rho` in the centered box of
/// side `side`.
inline PointSet sample_poisson(double rho, int dim, double side, std::uint64_t seed) {
  if (!(rho > 0.0)) throw InvalidParameter("sample_poisson: rho must be positive");
  if (!(side > 0.0)) throw InvalidParameter("sample_poisson: side must be positive");
  if (dim < 1) throw InvalidParameter("sample_poisson: dim must be >= 1");
  Rng rng = Rng(seed).split(detail::kStreamPositions);
  const double mean = rho * std::pow(side, dim);
  const auto count = rng.poisson(mean);
  std::vector<double> coords(count * static_cast<std::size_t>(dim));
  const double half = 0.5 * side;
  for (double& c : coords) c = rng.uniform(-half, half);
  return PointSet(dim, side, std::move(coords), seed, "poisson rho=" + detail::num_label(rho));
}

/// Inhomogeneous Poisson process by thinning a rate-`rho2` sample: a point x
/// is kept with probability intensity(x) / rho2.
///
/// Throws InvalidParameter if the intensity is not in (0, rho2] at a sampled
/// point. With intensity == rho2 the output equals sample_poisson(rho2, ...)
/// for the same seed.
inline PointSet sample_inhomogeneous_poisson(const std::function<double(std::span<const double>)>& intensity,
                                             double rho2, int dim, double side, std::uint64_t seed) {
  const PointSet parent = sample_poisson(rho2, dim, side, seed);
  Rng rng = Rng(seed).split(detail::kStreamThinning);
  std::vector<double> coords;
  coords.reserve(parent.coords().size());
  for (std::size_t i = 0; i < parent.size(); ++i) {
    const auto x = parent[i];
    const double f = intensity(x);
    if (!(f > 0.0) || f > rho2) {
      throw InvalidParameter("sample_inhomogeneous_poisson: intensity " + detail::num_label(f) +
                             " outside (0, rho2]");
    }
    if (rng.uniform() < f / rho2) coords.insert(coords.end(), x.begin(), x.end());
  }
  return PointSet(dim, side, std::move(coords), seed, "inhomogeneous rho2=" + detail::num_label(rho2));
}

/// Lattice spacing*Z^d restricted to the closed box, each site kept
/// independently with probability keep_prob. Sites on the box boundary are
/// included. With keep_prob == 1 no randomness is consumed.
inline PointSet sample_thinned_lattice(double spacing, double keep_prob, int dim, double side,
                                       std::uint64_t seed) {
  if (!(spacing > 0.0)) throw InvalidParameter("sample_thinned_lattice: spacing must be positive");
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) {
    throw InvalidParameter("sample_thinned_lattice: keep_prob must lie in (0, 1]");
  }
  if (!(side > 0.0) || dim < 1) throw InvalidParameter("sample_thinned_lattice: bad geometry");
  const double half = 0.5 * side;
  // Relative slack so that boundary sites like L/2 = k*spacing survive rounding.
  const double slack = 1e-12 * std::max(1.0, half / spacing);
  const auto kmin = static_cast<long long>(std::ceil(-half / spacing - slack));
  const auto kmax = static_cast<long long>(std::floor(half / spacing + slack));
  Rng rng = Rng(seed).split(detail::kStreamThinning);
  std::vector<double> coords;
  std::vector<long long> idx(dim, kmin);
  if (kmin > kmax) {
    return PointSet(dim, side, {}, seed, "lattice");
  }
  for (;;) {
    if (keep_prob >= 1.0 || rng.uniform() < keep_prob) {
      for (int k = 0; k < dim; ++k) {
        coords.push_back(std::clamp(static_cast<double>(idx[k]) * spacing, -half, half));
      }
    }
    int k = 0;
    while (k < dim && idx[k] == kmax) {
      idx[k] = kmin;
      ++k;
    }
    if (k == dim) break;
    ++idx[k];
  }
  return PointSet(dim, side, std::move(coords), seed,
                  "lattice spacing=" + detail::num_label(spacing) + " p=" + detail::num_label(keep_prob));
}

/// Occupation field sigma_x = 1{xi(B_x) >= 1} of the K-cubes
/// B_x = xK + [0, K)^d that overlap the box with positive volume. A point on
/// the upper face of the closed box is counted in the last cube.
struct BoxOccupancy {
  double cube_side = 1.0;
  int dim = 0;
  std::vector<long long> index_lo;  ///< smallest cube index per axis
  std::vector<long long> extent;    ///< cube count per axis
  std::vector<char> occupied;       ///< flat, axis 0 fastest

  [[nodiscard]] std::size_t size() const { return occupied.size(); }

  [[nodiscard]] std::vector<long long> index_of(std::size_t flat) const {
    std::vector<long long> x(dim);
    for (int k = 0; k < dim; ++k) {
      x[k] = index_lo[k] + static_cast<long long>(flat % static_cast<std::size_t>(extent[k]));
      flat /= static_cast<std::size_t>(extent[k]);
    }
    return x;
  }

  /// Flat position of lattice index x, or npos if outside the field.
  [[nodiscard]] std::size_t flat_of(std::span<const long long> x) const {
    std::size_t f = 0;
    for (int k = dim - 1; k >= 0; --k) {
      const long long rel = x[k] - index_lo[k];
      if (rel < 0 || rel >= extent[k]) return npos;
      f = f * static_cast<std::size_t>(extent[k]) + static_cast<std::size_t>(rel);
    }
    return f;
  }

  [[nodiscard]] bool sigma(std::span<const long long> x) const {
    const auto f = flat_of(x);
    return f != npos && occupied[f] != 0;
  }

  [[nodiscard]] double good_fraction() const {
    if (occupied.empty()) return 0.0;
    std::size_t g = 0;
    for (char c : occupied) g += c ? 1 : 0;
    return static_cast<double>(g) / static_cast<double>(occupied.size());
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Lattice index of the K-cube containing coordinate c (half-open cubes).
inline long long cube_index(double c, double cube_side) {
  return static_cast<long long>(std::floor(c / cube_side));
}

inline BoxOccupancy good_box_field(const PointSet& xi, double cube_side) {
  if (!(cube_side > 0.0)) throw InvalidParameter("good_box_field: cube side must be positive");
  BoxOccupancy field;
  field.cube_side = cube_side;
  field.dim = xi.dim();
  const double half = 0.5 * xi.side();
  std::size_t total = 1;
  const long long lo = cube_index(-half, cube_side);
  const auto hi = std::max(lo, static_cast<long long>(std::ceil(half / cube_side)) - 1);
  for (int k = 0; k < xi.dim(); ++k) {
    field.index_lo.push_back(lo);
    field.extent.push_back(hi - lo + 1);
    total *= static_cast<std::size_t>(hi - lo + 1);
  }
  field.occupied.assign(total, 0);
  std::vector<long long> x(xi.dim());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    for (int k = 0; k < xi.dim(); ++k) x[k] = std::min(hi, cube_index(xi[i][k], cube_side));
    field.occupied[field.flat_of(x)] = 1;
  }
  return field;
}

/// R_A(xi) = sum_{x in xi cap A} sum_{y in xi} exp(-|x-y|^alpha), diagonal
/// term included, so R_A >= xi(A).
///
/// Pairs with exp(-|x-y|^alpha) < 1e-18 are skipped; the neglected mass is
/// below double resolution of the diagonal term.
inline double r_statistic(const PointSet& xi, const Box& region, double alpha) {
  if (!(alpha > 0.0)) throw InvalidParameter("r_statistic: alpha must be positive");
  if (region.dim() != xi.dim()) throw InvalidParameter("r_statistic: region dimension mismatch");
  if (!xi.box().contains(region)) throw InvalidParameter("r_statistic: region must lie inside the box");
  const double radius = std::pow(18.0 * std::log(10.0), 1.0 / alpha);
  const detail::CellGrid grid(xi, radius);
  double total = 0.0;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    if (!region.contains(xi[i])) continue;
    double row = 0.0;
    grid.for_each_within(xi[i], radius, [&](std::size_t, double d2) {
      row += jump_rate(d2, alpha);
    });
    total += row;
  }
  return total;
}

/// Lattice truncation radius for S_ell: smallest integer V with
/// exp(-V^alpha) < 1e-16.
inline int s_statistic_radius(double alpha) {
  return static_cast<int>(std::floor(std::pow(16.0 * std::log(10.0), 1.0 / alpha))) + 1;
}

/// S_ell(xi) = sum_{u in Lambda_ell cap Z^d} sum_{v in Z^d} exp(-|u-v|^alpha) xi(Q_u) xi(Q_v),
/// with unit cells Q_u = u + [-1/2, 1/2)^d and the v-sum cut at
/// ||v - u||_inf <= s_statistic_radius(alpha).
inline double s_statistic(const PointSet& xi, int ell, double alpha) {
  if (ell < 1) throw InvalidParameter("s_statistic: ell must be >= 1");
  if (!(alpha > 0.0)) throw InvalidParameter("s_statistic: alpha must be positive");
  if (static_cast<double>(ell) > xi.side()) throw InvalidParameter("s_statistic: Lambda_ell must lie inside the box");
  const int d = xi.dim();
  const int vmax = s_statistic_radius(alpha);
  const double half = 0.5 * xi.side();

  // Cell counts on the lattice range touched by the box.
  const long long lo = static_cast<long long>(std::floor(-half + 0.5));
  const long long hi = static_cast<long long>(std::floor(half + 0.5));
  const long long width = hi - lo + 1;
  std::vector<double> counts;
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(width);
  counts.assign(total, 0.0);
  auto flat = [&](std::span<const long long> u) -> std::size_t {
    std::size_t f = 0;
    for (int k = d - 1; k >= 0; --k) {
      const long long rel = u[k] - lo;
      if (rel < 0 || rel >= width) return static_cast<std::size_t>(-1);
      f = f * static_cast<std::size_t>(width) + static_cast<std::size_t>(rel);
    }
    return f;
  };
  std::vector<long long> u(d), v(d), w(d);
  for (std::size_t i = 0; i < xi.size(); ++i) {
    for (int k = 0; k < d; ++k) u[k] = static_cast<long long>(std::floor(xi[i][k] + 0.5));
    counts[flat(u)] += 1.0;
  }

  // Kernel over the offset cube [-vmax, vmax]^d.
  const long long kw = 2LL * vmax + 1;
  std::size_t ktotal = 1;
  for (int k = 0; k < d; ++k) ktotal *= static_cast<std::size_t>(kw);
  std::vector<double> kernel(ktotal);
  for (std::size_t f = 0; f < ktotal; ++f) {
    std::size_t g = f;
    double r2 = 0.0;
    for (int k = 0; k < d; ++k) {
      const double off = static_cast<double>(static_cast<long long>(g % static_cast<std::size_t>(kw)) - vmax);
      g /= static_cast<std::size_t>(kw);
      r2 += off * off;
    }
    kernel[f] = std::exp(-std::pow(r2, 0.5 * alpha));
  }

  const long long ulo = static_cast<long long>(std::ceil(-0.5 * ell));
  const long long uhi = static_cast<long long>(std::floor(0.5 * ell));
  double s = 0.0;
  std::fill(u.begin(), u.end(), ulo);
  for (;;) {
    const std::size_t fu = flat(u);
    const double cu = fu == static_cast<std::size_t>(-1) ? 0.0 : counts[fu];
    if (cu > 0.0) {
      // Offsets walk row by row along axis 0, which is contiguous in both
      // the count grid and the kernel.
      double inner = 0.0;
      std::fill(w.begin(), w.end(), -static_cast<long long>(vmax));
      std::size_t kf = 0;
      const long long a0 = std::max(-static_cast<long long>(vmax), lo - u[0]);
      const long long b0 = std::min(static_cast<long long>(vmax), hi - u[0]);
      for (;;) {
        v[0] = u[0] + a0;
        for (int k = 1; k < d; ++k) v[k] = u[k] + w[k];
        const std::size_t fv = a0 <= b0 ? flat(v) : static_cast<std::size_t>(-1);
        if (fv != static_cast<std::size_t>(-1)) {
          const double* krow = kernel.data() + kf + static_cast<std::size_t>(a0 + vmax);
          const double* crow = counts.data() + fv;
          for (long long j = 0; j <= b0 - a0; ++j) inner += krow[j] * crow[j];
        }
        kf += static_cast<std::size_t>(kw);
        int k = 1;
        while (k < d && w[k] == vmax) {
          w[k] = -vmax;
          ++k;
        }
        if (k >= d) break;
        ++w[k];
      }
      s += cu * inner;
    }
    int k = 0;
    while (k < d && u[k] == uhi) {
      u[k] = ulo;
      ++k;
    }
    if (k == d) break;
    ++u[k];
  }
  return s;
}

}  // namespace rwlab
