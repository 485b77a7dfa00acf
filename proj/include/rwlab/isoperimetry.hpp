#pragma once

// Conductances, exact Cheeger constants and isoperimetric profiles by subset
// enumeration, sweep-cut and trap upper bounds.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "rwlab/error.hpp"
#include "rwlab/profiles.hpp"
#include "rwlab/spectral.hpp"
#include "rwlab/walk.hpp"

namespace rwlab {

struct CutReport {
  std::vector<std::size_t> subset;  ///< sorted vertex indices
  double weight = 0.0;              ///< W(U)
  double flow = 0.0;                ///< sum over U x U^c of untruncated rates
  double conductance = 0.0;         ///< flow / weight
  double pi_mass = 0.0;             ///< W(U) / W(all)
};

/// Exact conductance of U; the flow uses rates recomputed from coordinates.
inline CutReport cut_conductance(const WalkGenerator& gen, std::span<const std::size_t> subset) {
  const std::size_t n = gen.size();
  std::vector<char> in(n, 0);
  for (std::size_t x : subset) {
    if (x >= n) throw InvalidCut("cut_conductance: vertex index out of range");
    if (in[x]) throw InvalidCut("cut_conductance: repeated vertex");
    in[x] = 1;
  }
  if (subset.empty() || subset.size() == n) throw InvalidCut("cut_conductance: U must be nonempty and proper");
  CutReport r;
  r.subset.assign(subset.begin(), subset.end());
  std::sort(r.subset.begin(), r.subset.end());
  for (std::size_t x : r.subset) {
    r.weight += gen.weights()[x];
    for (std::size_t y = 0; y < n; ++y) {
      if (!in[y]) r.flow += gen.graph().exact_rate(x, y);
    }
  }
  r.conductance = r.flow / r.weight;
  r.pi_mass = r.weight / gen.total_weight();
  return r;
}

namespace detail {

inline std::vector<std::size_t> mask_to_set(std::uint64_t mask) {
  std::vector<std::size_t> s;
  while (mask != 0) {
    s.push_back(static_cast<std::size_t>(std::countr_zero(mask)));
    mask &= mask - 1;
  }
  return s;
}

/// True when the sorted index list of a precedes that of b.
inline bool lex_less(std::uint64_t a, std::uint64_t b) {
  if (a == b) return false;
  const std::uint64_t diff = a ^ b;
  const int d = std::countr_zero(diff);
  const auto above = [d](std::uint64_t m) { return d + 1 < 64 && (m >> (d + 1)) != 0; };
  // Both lists agree below d; the one holding d is smaller unless the other
  // list ends there.
  if (a >> d & 1U) return above(b);
  return !above(a);
}

/// Subset enumerator. Flows are assembled from per-vertex tables of partial
/// rate sums over the low and high halves of the vertex set, so every flow
/// is a sum of positive terms.
class CutEnumerator {
 public:
  explicit CutEnumerator(const WalkGenerator& gen) : n_(gen.size()) {
    if (n_ > 63) throw SizeLimit("cut enumeration: too many states");
    lo_bits_ = n_ / 2;
    hi_bits_ = n_ - lo_bits_;
    const std::size_t lo_size = std::size_t{1} << lo_bits_;
    const std::size_t hi_size = std::size_t{1} << hi_bits_;
    lo_.assign(n_ * lo_size, 0.0);
    hi_.assign(n_ * hi_size, 0.0);
    wlo_.assign(lo_size, 0.0);
    whi_.assign(hi_size, 0.0);
    const auto& w = gen.weights();
    for (std::size_t m = 1; m < lo_size; ++m) {
      const auto b = static_cast<std::size_t>(std::countr_zero(m));
      wlo_[m] = wlo_[m & (m - 1)] + w[b];
    }
    for (std::size_t m = 1; m < hi_size; ++m) {
      const auto b = static_cast<std::size_t>(std::countr_zero(m));
      whi_[m] = whi_[m & (m - 1)] + w[lo_bits_ + b];
    }
    for (std::size_t x = 0; x < n_; ++x) {
      double* tl = lo_.data() + x * lo_size;
      double* th = hi_.data() + x * hi_size;
      for (std::size_t m = 1; m < lo_size; ++m) {
        const auto b = static_cast<std::size_t>(std::countr_zero(m));
        tl[m] = tl[m & (m - 1)] + (b == x ? 0.0 : gen.graph().exact_rate(x, b));
      }
      for (std::size_t m = 1; m < hi_size; ++m) {
        const auto b = lo_bits_ + static_cast<std::size_t>(std::countr_zero(m));
        th[m] = th[m & (m - 1)] + (b == x ? 0.0 : gen.graph().exact_rate(x, b));
      }
    }
  }

  [[nodiscard]] std::uint64_t full() const { return (std::uint64_t{1} << n_) - 1; }

  /// fn(mask, weight, count, flow) for every proper nonempty subset.
  template <class Fn>
  void for_each(Fn&& fn) const {
    for_range(1, full(), fn);
  }

  template <class Fn>
  void for_range(std::uint64_t begin, std::uint64_t end, Fn&& fn) const {
    const std::uint64_t lo_mask = (std::uint64_t{1} << lo_bits_) - 1;
    const std::size_t lo_size = std::size_t{1} << lo_bits_;
    const std::size_t hi_size = std::size_t{1} << hi_bits_;
    for (std::uint64_t mask = begin; mask < end; ++mask) {
      const std::uint64_t ulo = mask & lo_mask;
      const std::uint64_t uhi = mask >> lo_bits_;
      const std::uint64_t clo = ~ulo & lo_mask;
      const std::uint64_t chi = ~uhi & ((std::uint64_t{1} << hi_bits_) - 1);
      double flow = 0.0;
      std::uint64_t m = mask;
      while (m != 0) {
        const auto x = static_cast<std::size_t>(std::countr_zero(m));
        m &= m - 1;
        flow += lo_[x * lo_size + clo] + hi_[x * hi_size + chi];
      }
      fn(mask, wlo_[ulo] + whi_[uhi], std::popcount(mask), flow);
    }
  }

 private:
  std::size_t n_;
  std::size_t lo_bits_ = 0;
  std::size_t hi_bits_ = 0;
  std::vector<double> lo_, hi_, wlo_, whi_;
};

inline void require_enumerable(const WalkGenerator& gen, const SizeLimits& limits, const char* who) {
  if (gen.size() > limits.cut_enumeration) {
    throw SizeLimit(std::string(who) + ": n exceeds the enumeration limit; use cheeger_sweep_upper or trap_upper_bound");
  }
  if (gen.size() < 2) throw InvalidParameter(std::string(who) + ": needs at least two states");
}

inline void require_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidParameter("profile grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0 && grid[k] <= 1.0)) throw InvalidParameter("profile grid values must lie in (0, 1]");
    if (k > 0 && !(grid[k] > grid[k - 1])) throw InvalidParameter("profile grid must be increasing");
  }
}

}  // namespace detail

struct CheegerResult {
  double phi = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> argmin;
};

/// Exact Cheeger constant over U with W(U) <= W/2.
inline CheegerResult cheeger_exact(const WalkGenerator& gen, const SizeLimits& limits = {}) {
  detail::require_enumerable(gen, limits, "cheeger_exact");
  const detail::CutEnumerator en(gen);
  const double cap = 0.5 * gen.total_weight() * (1.0 + kFractionSlack);
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t best_mask = 0;
  en.for_each([&](std::uint64_t mask, double weight, int, double flow) {
    if (weight > cap) return;
    const double c = flow / weight;
    if (c < best || (c == best && detail::lex_less(mask, best_mask))) {
      best = c;
      best_mask = mask;
    }
  });
  return {best, detail::mask_to_set(best_mask)};
}

namespace detail {

template <class SizeOf>
IsoProfile grid_profile(const WalkGenerator& gen, const std::vector<double>& grid, double total, SizeOf size_of) {
  require_grid(grid);
  const detail::CutEnumerator en(gen);
  std::vector<double> caps(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) caps[k] = grid[k] * total * (1.0 + kFractionSlack);
  std::vector<double> best(grid.size(), std::numeric_limits<double>::infinity());
  en.for_each([&](std::uint64_t, double weight, int count, double flow) {
    const double s = size_of(weight, count);
    const auto it = std::lower_bound(caps.begin(), caps.end(), s);
    if (it == caps.end()) return;
    auto& b = best[static_cast<std::size_t>(it - caps.begin())];
    b = std::min(b, flow / weight);
  });
  for (std::size_t k = 1; k < best.size(); ++k) best[k] = std::min(best[k], best[k - 1]);
  IsoProfile p;
  p.grid = grid;
  p.values = std::move(best);
  p.model = to_int(gen.model());
  return p;
}

}  // namespace detail

/// phi(t) = min over U with W(U) <= t W of I_U at every grid point; +inf
/// where nothing is admissible.
inline IsoProfile iso_profile_exact(const WalkGenerator& gen, const std::vector<double>& grid,
                                    const SizeLimits& limits = {}) {
  detail::require_enumerable(gen, limits, "iso_profile_exact");
  return detail::grid_profile(gen, grid, gen.total_weight(), [](double weight, int) { return weight; });
}

/// The complete staircase of phi: breakpoints are the weight fractions at
/// which the running minimum drops. Proper subsets only.
inline IsoProfile iso_profile_staircase(const WalkGenerator& gen, const SizeLimits& limits = {}) {
  detail::require_enumerable(gen, limits, "iso_profile_staircase");
  const detail::CutEnumerator en(gen);
  struct Point {
    double weight;
    double value;
  };
  const auto frontier = [](std::vector<Point>& pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
      return a.weight < b.weight || (a.weight == b.weight && a.value < b.value);
    });
    std::vector<Point> out;
    for (const Point& p : pts) {
      if (out.empty() || p.value < out.back().value) out.push_back(p);
    }
    pts = std::move(out);
  };
  std::vector<Point> global;
  std::vector<Point> chunk;
  const std::uint64_t step = std::uint64_t{1} << 18;
  for (std::uint64_t begin = 1; begin < en.full(); begin += step) {
    const std::uint64_t end = std::min(en.full(), begin + step);
    chunk.clear();
    en.for_range(begin, end, [&](std::uint64_t, double weight, int, double flow) {
      chunk.push_back({weight, flow / weight});
    });
    frontier(chunk);
    global.insert(global.end(), chunk.begin(), chunk.end());
    frontier(global);
  }
  IsoProfile p;
  p.model = to_int(gen.model());
  p.convention = StepConvention::staircase;
  for (const Point& q : global) {
    p.grid.push_back(q.weight / gen.total_weight());
    p.values.push_back(q.value);
  }
  return p;
}

/// psi(t) = min over U with #U <= t n of the model-3 conductance.
inline IsoProfile hybrid_profile_exact(const WalkGenerator& gen3, const std::vector<double>& grid,
                                       const SizeLimits& limits = {}) {
  if (gen3.model() != Model::hybrid) throw InvalidModel("hybrid_profile_exact: requires model 3");
  detail::require_enumerable(gen3, limits, "hybrid_profile_exact");
  IsoProfile p = detail::grid_profile(gen3, grid, static_cast<double>(gen3.size()),
                                      [](double, int count) { return static_cast<double>(count); });
  p.kind = ProfileKind::hybrid;
  return p;
}

struct BoundResult {
  double phi_upper = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> cut;
};

/// Sweep over prefixes of the vertex order given by the gap eigenvector
/// (ties by index); each prefix or its complement, whichever has at most
/// half the weight, is a candidate. The winner is re-evaluated exactly.
inline BoundResult cheeger_sweep_upper(const WalkGenerator& gen, const std::vector<double>& eigvec) {
  const std::size_t n = gen.size();
  if (n < 2) throw InvalidParameter("cheeger_sweep_upper: needs at least two states");
  if (eigvec.size() != n) throw InvalidParameter("cheeger_sweep_upper: eigenvector size mismatch");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return eigvec[a] < eigvec[b] || (eigvec[a] == eigvec[b] && a < b);
  });
  const double total = gen.total_weight();
  const double cap = 0.5 * total * (1.0 + kFractionSlack);
  std::vector<char> in(n, 0);
  long double flow = 0.0L;
  long double weight = 0.0L;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  bool best_prefix = true;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::size_t v = order[k];
    long double inside = 0.0L;
    long double outside = 0.0L;
    for (std::size_t y = 0; y < n; ++y) {
      if (y == v) continue;
      const double r = gen.graph().exact_rate(v, y);
      (in[y] ? inside : outside) += r;
    }
    flow += outside - inside;
    in[v] = 1;
    weight += gen.weights()[v];
    const auto w = static_cast<double>(weight);
    const double rest = total - w;
    const bool prefix = w <= cap;
    const double denom = prefix ? w : rest;
    if (!prefix && rest > cap) continue;
    const double c = static_cast<double>(flow) / denom;
    if (c < best) {
      best = c;
      best_k = k;
      best_prefix = prefix;
    }
  }
  std::vector<std::size_t> cut;
  if (best_prefix) {
    cut.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_k + 1));
  } else {
    cut.assign(order.begin() + static_cast<std::ptrdiff_t>(best_k + 1), order.end());
  }
  std::sort(cut.begin(), cut.end());
  const CutReport exact = cut_conductance(gen, cut);
  return {exact.conductance, exact.subset};
}

inline BoundResult cheeger_sweep_upper(const WalkGenerator& gen, const SizeLimits& limits = {}) {
  if (gen.size() == 2) return cheeger_sweep_upper(gen, std::vector<double>{0.0, 1.0});
  const GapResult g = spectral_gap(gen, limits);
  return cheeger_sweep_upper(gen, g.eigvec);
}

/// Number of model-2 pair candidates evaluated exactly.
inline constexpr std::size_t kTrapPairCandidates = 64;

/// Upper bound on the Cheeger constant from isolated points (all models)
/// and, for model 2, isolated close pairs.
inline BoundResult trap_upper_bound(const WalkGenerator& gen) {
  const std::size_t n = gen.size();
  if (n < 3) throw InvalidParameter("trap_upper_bound: needs at least three states");
  const auto& g = gen.graph();
  const double cap = 0.5 * gen.total_weight() * (1.0 + kFractionSlack);
  BoundResult best;
  const auto offer = [&](double value, std::vector<std::size_t> cut) {
    if (value < best.phi_upper || (value == best.phi_upper && cut < best.cut)) {
      best.phi_upper = value;
      best.cut = std::move(cut);
    }
  };
  std::vector<double> degree(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      const double r = g.exact_rate(x, y);
      degree[x] += r;
      degree[y] += r;
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (gen.weights()[x] > cap) continue;
    offer(degree[x] / gen.weights()[x], {x});
  }
  if (gen.model() != Model::weighted) return best;

  // Two nearest neighbors of each point.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, std::size_t>> nn1(n, {inf, n}), nn2(n, {inf, n});
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x) continue;
      const std::pair<double, std::size_t> c{g.points().distance2(x, y), y};
      if (c < nn1[x]) {
        nn2[x] = nn1[x];
        nn1[x] = c;
      } else if (c < nn2[x]) {
        nn2[x] = c;
      }
    }
  }
  const double reach2 = static_cast<double>(gen.points().dim());
  struct Pair {
    double isolation2;
    std::size_t a, b;
  };
  std::vector<Pair> pairs;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      if (g.points().distance2(x, y) > reach2) continue;
      const double ix = nn1[x].second == y ? nn2[x].first : nn1[x].first;
      const double iy = nn1[y].second == x ? nn2[y].first : nn1[y].first;
      pairs.push_back({std::min(ix, iy), x, y});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& p, const Pair& q) {
    return p.isolation2 > q.isolation2 || (p.isolation2 == q.isolation2 && std::tie(p.a, p.b) < std::tie(q.a, q.b));
  });
  if (pairs.size() > kTrapPairCandidates) pairs.resize(kTrapPairCandidates);
  for (const Pair& p : pairs) {
    const std::size_t cut[2] = {p.a, p.b};
    const CutReport r = cut_conductance(gen, cut);
    if (r.weight > cap) continue;
    offer(r.conductance, r.subset);
  }
  return best;
}

}  // namespace rwlab
