#pragma once

// Bernoulli site percolation on {0..n-1}^d and the grey-cube constructions
// over sampled point sets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "rwlab/error.hpp"
#include "rwlab/point_set.hpp"
#include "rwlab/pointprocess.hpp"
#include "rwlab/rng.hpp"

namespace rwlab {

inline constexpr std::uint64_t kStreamSites = 3;
inline constexpr std::uint64_t kStreamGrowth = 4;

/// Site field on B_n = {0..n-1}^d, axis 0 fastest.
struct SiteField {
  int n = 0;
  int dim = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::vector<char> open;

  [[nodiscard]] std::size_t size() const { return open.size(); }

  [[nodiscard]] int coord(std::size_t site, int axis) const {
    for (int k = 0; k < axis; ++k) site /= static_cast<std::size_t>(n);
    return static_cast<int>(site % static_cast<std::size_t>(n));
  }

  [[nodiscard]] std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int k = 0; k < axis; ++k) s *= static_cast<std::size_t>(n);
    return s;
  }
};

namespace detail {

inline std::size_t lattice_volume(int n, int dim) {
  std::size_t v = 1;
  for (int k = 0; k < dim; ++k) v *= static_cast<std::size_t>(n);
  return v;
}

}  // namespace detail

inline SiteField sample_site_field(int n, int dim, double p, std::uint64_t seed) {
  if (n < 1 || dim < 1) throw InvalidParameter("sample_site_field: n and dim must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("sample_site_field: p must lie in [0, 1]");
  SiteField f{n, dim, p, seed, {}};
  f.open.resize(detail::lattice_volume(n, dim));
  Rng rng(seed, kStreamSites);
  for (auto& s : f.open) s = rng.bernoulli(p) ? 1 : 0;
  return f;
}

/// Field from explicit occupation values (tests, file input).
inline SiteField make_site_field(int n, int dim, std::vector<char> open) {
  if (n < 1 || dim < 1) throw InvalidParameter("make_site_field: n and dim must be >= 1");
  if (open.size() != detail::lattice_volume(n, dim)) throw InvalidInput("make_site_field: wrong site count");
  SiteField f{n, dim, std::numeric_limits<double>::quiet_NaN(), 0, std::move(open)};
  return f;
}

struct ClusterLabeling {
  int n = 0;
  int dim = 0;
  std::vector<int> label;  ///< -1 for closed sites; labels in order of first site
  std::vector<std::size_t> sizes;
  std::vector<int> diameters;  ///< l_inf diameter per label
  std::vector<std::vector<int>> lo, hi;  ///< bounding box per label
  int max_label = -1;  ///< largest cluster, smallest label on ties

  [[nodiscard]] std::size_t count() const { return sizes.size(); }
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

inline ClusterLabeling label_clusters(const SiteField& field) {
  const std::size_t total = field.size();
  detail::UnionFind uf(total);
  for (std::size_t s = 0; s < total; ++s) {
    if (!field.open[s]) continue;
    for (int k = 0; k < field.dim; ++k) {
      if (field.coord(s, k) + 1 < field.n) {
        const std::size_t t = s + field.stride(k);
        if (field.open[t]) uf.unite(s, t);
      }
    }
  }
  ClusterLabeling c;
  c.n = field.n;
  c.dim = field.dim;
  c.label.assign(total, -1);
  std::vector<int> root_label(total, -1);
  for (std::size_t s = 0; s < total; ++s) {
    if (!field.open[s]) continue;
    const std::size_t r = uf.find(s);
    if (root_label[r] < 0) {
      root_label[r] = static_cast<int>(c.sizes.size());
      c.sizes.push_back(0);
      c.lo.emplace_back(field.dim, field.n);
      c.hi.emplace_back(field.dim, -1);
    }
    const int l = root_label[r];
    c.label[s] = l;
    ++c.sizes[static_cast<std::size_t>(l)];
    for (int k = 0; k < field.dim; ++k) {
      const int x = field.coord(s, k);
      auto& lo = c.lo[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
      auto& hi = c.hi[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  c.diameters.resize(c.sizes.size());
  for (std::size_t l = 0; l < c.sizes.size(); ++l) {
    int d = 0;
    for (int k = 0; k < field.dim; ++k) d = std::max(d, c.hi[l][static_cast<std::size_t>(k)] - c.lo[l][static_cast<std::size_t>(k)]);
    c.diameters[l] = d;
    if (c.max_label < 0 || c.sizes[l] > c.sizes[static_cast<std::size_t>(c.max_label)]) c.max_label = static_cast<int>(l);
  }
  return c;
}

namespace detail {

/// Dinic maximum flow with integer capacities.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes) : head_(nodes, -1), level_(nodes), it_(nodes) {}

  void add_edge(std::size_t u, std::size_t v, int cap) {
    edges_.push_back({v, head_[u], cap});
    head_[u] = static_cast<int>(edges_.size()) - 1;
    edges_.push_back({u, head_[v], 0});
    head_[v] = static_cast<int>(edges_.size()) - 1;
  }

  long long run(std::size_t s, std::size_t t) {
    long long total = 0;
    while (bfs(s, t)) {
      for (std::size_t i = 0; i < it_.size(); ++i) it_[i] = head_[i];
      while (const int f = augment(s, t)) total += f;
    }
    return total;
  }

 private:
  struct Edge {
    std::size_t to;
    int next;
    int cap;
  };

  bool bfs(std::size_t s, std::size_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (int e = head_[u]; e >= 0; e = edges_[static_cast<std::size_t>(e)].next) {
        const Edge& ed = edges_[static_cast<std::size_t>(e)];
        if (ed.cap > 0 && level_[ed.to] < 0) {
          level_[ed.to] = level_[u] + 1;
          q.push(ed.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  // Iterative blocking-flow search; recursion depth would reach n^d.
  int augment(std::size_t s, std::size_t t) {
    std::vector<int> path;
    std::size_t u = s;
    for (;;) {
      if (u == t) {
        int f = std::numeric_limits<int>::max();
        for (int e : path) f = std::min(f, edges_[static_cast<std::size_t>(e)].cap);
        for (int e : path) {
          edges_[static_cast<std::size_t>(e)].cap -= f;
          edges_[static_cast<std::size_t>(e ^ 1)].cap += f;
        }
        return f;
      }
      int& e = it_[u];
      while (e >= 0) {
        const Edge& ed = edges_[static_cast<std::size_t>(e)];
        if (ed.cap > 0 && level_[ed.to] == level_[u] + 1) break;
        e = ed.next;
      }
      if (e >= 0) {
        path.push_back(e);
        u = edges_[static_cast<std::size_t>(e)].to;
        continue;
      }
      if (path.empty()) return 0;
      // Dead end: prune u and step back.
      level_[u] = -1;
      const int back = path.back();
      path.pop_back();
      u = edges_[static_cast<std::size_t>(back ^ 1)].to;
      it_[u] = edges_[static_cast<std::size_t>(it_[u])].next;
    }
  }

  std::vector<Edge> edges_;
  std::vector<int> head_;
  std::vector<int> level_;
  std::vector<int> it_;
};

}  // namespace detail

/// Maximal number of vertex-disjoint open paths between the two faces
/// orthogonal to `direction`.
inline long long crossing_count(const SiteField& field, int direction) {
  if (field.dim < 2) throw InvalidParameter("crossing_count: requires dim >= 2");
  if (direction < 0 || direction >= field.dim) throw InvalidParameter("crossing_count: bad direction");
  const std::size_t total = field.size();
  const std::size_t source = 2 * total;
  const std::size_t sink = source + 1;
  detail::MaxFlow mf(2 * total + 2);
  for (std::size_t s = 0; s < total; ++s) {
    if (!field.open[s]) continue;
    mf.add_edge(2 * s, 2 * s + 1, 1);
    const int x = field.coord(s, direction);
    if (x == 0) mf.add_edge(source, 2 * s, 1);
    if (x == field.n - 1) mf.add_edge(2 * s + 1, sink, 1);
    for (int k = 0; k < field.dim; ++k) {
      if (field.coord(s, k) + 1 >= field.n) continue;
      const std::size_t t = s + field.stride(k);
      if (!field.open[t]) continue;
      mf.add_edge(2 * s + 1, 2 * t, 1);
      mf.add_edge(2 * t + 1, 2 * s, 1);
    }
  }
  return mf.run(source, sink);
}

struct EventReport {
  bool a = false;  ///< at most one cluster with diameter >= floor(n/10)
  bool b = false;  ///< some cluster meets all 2d faces
  bool c = false;  ///< some cluster has >= kappa n^d sites
  std::size_t max_size = 0;
  int max_diam = 0;
};

inline EventReport evaluate_events(const ClusterLabeling& lab, double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw InvalidParameter("evaluate_events: kappa must lie in (0, 1)");
  EventReport r;
  const int big = lab.n / 10;
  const double need = kappa * static_cast<double>(detail::lattice_volume(lab.n, lab.dim));
  int large = 0;
  for (std::size_t l = 0; l < lab.count(); ++l) {
    if (lab.diameters[l] >= big) ++large;
    bool all_faces = true;
    for (int k = 0; k < lab.dim; ++k) {
      all_faces = all_faces && lab.lo[l][static_cast<std::size_t>(k)] == 0 &&
                  lab.hi[l][static_cast<std::size_t>(k)] == lab.n - 1;
    }
    r.b = r.b || all_faces;
    r.c = r.c || static_cast<double>(lab.sizes[l]) >= need;
    r.max_size = std::max(r.max_size, lab.sizes[l]);
    r.max_diam = std::max(r.max_diam, lab.diameters[l]);
  }
  r.a = large <= 1;
  return r;
}

inline EventReport evaluate_events(const SiteField& field, double kappa) {
  return evaluate_events(label_clusters(field), kappa);
}

/// Blocks of side `cube_side` per axis; the trailing partial block is merged
/// into the last full one. Returns (first coordinate, length) pairs.
inline std::vector<std::pair<int, int>> merged_blocks(int n, int cube_side) {
  if (cube_side < 1) throw InvalidParameter("cube side must be >= 1");
  if (cube_side > n) throw ScaleError("cube side exceeds the lattice side");
  const int count = n / cube_side;
  std::vector<std::pair<int, int>> blocks;
  for (int b = 0; b < count; ++b) blocks.emplace_back(b * cube_side, cube_side);
  blocks.back().second += n - count * cube_side;
  return blocks;
}

/// min over cubes C_j of |M(n) cap C_j| / |C_j| for the maximal cluster.
inline double cluster_cube_density(const ClusterLabeling& lab, int cube_side) {
  const auto blocks = merged_blocks(lab.n, cube_side);
  const std::size_t per_axis = blocks.size();
  std::vector<int> block_of(static_cast<std::size_t>(lab.n));
  for (std::size_t b = 0; b < per_axis; ++b) {
    for (int i = 0; i < blocks[b].second; ++i) block_of[static_cast<std::size_t>(blocks[b].first + i)] = static_cast<int>(b);
  }
  const std::size_t cubes = detail::lattice_volume(static_cast<int>(per_axis), lab.dim);
  std::vector<std::size_t> hit(cubes, 0), volume(cubes, 0);
  for (std::size_t s = 0; s < lab.label.size(); ++s) {
    std::size_t rest = s;
    std::size_t cube = 0;
    std::size_t stride = 1;
    for (int k = 0; k < lab.dim; ++k) {
      const auto x = rest % static_cast<std::size_t>(lab.n);
      rest /= static_cast<std::size_t>(lab.n);
      cube += stride * static_cast<std::size_t>(block_of[x]);
      stride *= per_axis;
    }
    ++volume[cube];
    if (lab.max_label >= 0 && lab.label[s] == lab.max_label) ++hit[cube];
  }
  double m = 1.0;
  for (std::size_t c = 0; c < cubes; ++c) m = std::min(m, static_cast<double>(hit[c]) / static_cast<double>(volume[c]));
  return m;
}

/// Run-length dump: a "# n=..,dim=..,p=..,seed=.." line, then one row per
/// axis-0 line with runs written as <count><o|.>.
inline void write_field_rle(std::ostream& out, const SiteField& f) {
  out << "# n=" << f.n << ",dim=" << f.dim << ",p=" << detail::format_g17(f.p) << ",seed=" << f.seed << '\n';
  const auto n = static_cast<std::size_t>(f.n);
  for (std::size_t row = 0; row < f.size(); row += n) {
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j < n && f.open[row + j] == f.open[row + i]) ++j;
      out << (j - i) << (f.open[row + i] ? 'o' : '.');
      i = j;
    }
    out << '\n';
  }
}

inline SiteField read_field_rle(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw InvalidInput("field dump: missing header");
  SiteField f;
  for (const auto& kv : detail::split(line.substr(2), ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidInput("field dump: bad header entry");
    const std::string key = detail::trim(kv.substr(0, eq));
    const std::string val = detail::trim(kv.substr(eq + 1));
    if (key == "n") f.n = std::stoi(val);
    else if (key == "dim") f.dim = std::stoi(val);
    else if (key == "p") f.p = detail::parse_double(val);
    else if (key == "seed") f.seed = std::stoull(val);
  }
  if (f.n < 1 || f.dim < 1) throw InvalidInput("field dump: bad dimensions");
  const std::size_t total = detail::lattice_volume(f.n, f.dim);
  while (f.open.size() < total && std::getline(in, line)) {
    std::size_t row = 0;
    std::size_t count = 0;
    for (char ch : line) {
      if (ch >= '0' && ch <= '9') {
        count = count * 10 + static_cast<std::size_t>(ch - '0');
      } else if (ch == 'o' || ch == '.') {
        f.open.insert(f.open.end(), count, ch == 'o' ? 1 : 0);
        row += count;
        count = 0;
      } else if (ch != '\r') {
        throw InvalidInput("field dump: bad character");
      }
    }
    if (row != static_cast<std::size_t>(f.n)) throw InvalidInput("field dump: row length mismatch");
  }
  if (f.open.size() != total) throw InvalidInput("field dump: truncated");
  return f;
}

inline void write_event_csv_header(std::ostream& out) {
  out << "n,p,seed,A,B,C,max_size,max_diam,min_cube_density\n";
}

inline void write_event_csv_row(std::ostream& out, const SiteField& f, const EventReport& e, double density) {
  out << f.n << ',' << detail::format_g17(f.p) << ',' << f.seed << ',' << int(e.a) << ',' << int(e.b) << ','
      << int(e.c) << ',' << e.max_size << ',' << e.max_diam << ',' << detail::format_g17(density) << '\n';
}

/// Largest nearest-neighbor component of good K-cubes lying inside the box.
struct GreyCluster {
  double cube_side = 1.0;
  int dim = 0;
  double side = 0.0;
  std::vector<long long> index_lo;  ///< inside-cube grid, smallest index per axis
  std::vector<long long> extent;
  std::vector<char> good;    ///< per inside cube
  std::vector<char> member;  ///< per inside cube
  std::size_t member_count = 0;

  [[nodiscard]] std::size_t size() const { return good.size(); }

  [[nodiscard]] std::vector<long long> index_of(std::size_t flat) const {
    std::vector<long long> x(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) {
      x[static_cast<std::size_t>(k)] = index_lo[static_cast<std::size_t>(k)] +
                                       static_cast<long long>(flat % static_cast<std::size_t>(extent[static_cast<std::size_t>(k)]));
      flat /= static_cast<std::size_t>(extent[static_cast<std::size_t>(k)]);
    }
    return x;
  }

  [[nodiscard]] std::size_t flat_of(std::span<const long long> x) const {
    std::size_t f = 0;
    for (int k = dim - 1; k >= 0; --k) {
      const long long rel = x[static_cast<std::size_t>(k)] - index_lo[static_cast<std::size_t>(k)];
      if (rel < 0 || rel >= extent[static_cast<std::size_t>(k)]) return BoxOccupancy::npos;
      f = f * static_cast<std::size_t>(extent[static_cast<std::size_t>(k)]) + static_cast<std::size_t>(rel);
    }
    return f;
  }

  /// Flat neighbors (axis-aligned, distance K) inside the grid.
  template <class Fn>
  void for_each_neighbor(std::size_t flat, Fn&& fn) const {
    std::size_t stride = 1;
    std::size_t rest = flat;
    for (int k = 0; k < dim; ++k) {
      const auto ext = static_cast<std::size_t>(extent[static_cast<std::size_t>(k)]);
      const std::size_t x = rest % ext;
      rest /= ext;
      if (x > 0) fn(flat - stride);
      if (x + 1 < ext) fn(flat + stride);
      stride *= ext;
    }
  }

  [[nodiscard]] std::vector<std::vector<long long>> members() const {
    std::vector<std::vector<long long>> out;
    for (std::size_t f = 0; f < member.size(); ++f) {
      if (member[f]) out.push_back(index_of(f));
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

inline GreyCluster grey_cluster(const PointSet& xi, double cube_side) {
  if (!(cube_side > 0.0)) throw InvalidParameter("grey_cluster: cube side must be positive");
  const BoxOccupancy occ = good_box_field(xi, cube_side);
  GreyCluster g;
  g.cube_side = cube_side;
  g.dim = xi.dim();
  g.side = xi.side();
  const double half = 0.5 * xi.side();
  const double tol = 1e-12 * std::max(1.0, half);
  std::size_t total = 1;
  for (int k = 0; k < g.dim; ++k) {
    const auto lo = static_cast<long long>(std::ceil((-half - tol) / cube_side));
    const auto hi = static_cast<long long>(std::floor((half + tol) / cube_side)) - 1;
    if (hi < lo) throw EmptyEnvironment("grey_cluster: no K-cube fits inside the box");
    g.index_lo.push_back(lo);
    g.extent.push_back(hi - lo + 1);
    total *= static_cast<std::size_t>(hi - lo + 1);
  }
  g.good.assign(total, 0);
  g.member.assign(total, 0);
  bool any = false;
  for (std::size_t f = 0; f < total; ++f) {
    const auto x = g.index_of(f);
    g.good[f] = occ.sigma(x) ? 1 : 0;
    any = any || g.good[f];
  }
  if (!any) throw EmptyEnvironment("grey_cluster: no good cube inside the box");

  // The flat scan runs axis 0 fastest, which is not lexicographic order, so
  // each component tracks its smallest index explicitly.
  std::vector<int> comp(total, -1);
  std::size_t best_size = 0;
  std::vector<long long> best_min;
  int best_comp = -1;
  int next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t f = 0; f < total; ++f) {
    if (!g.good[f] || comp[f] >= 0) continue;
    std::size_t size = 0;
    std::vector<long long> smallest = g.index_of(f);
    comp[f] = next;
    stack.push_back(f);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      ++size;
      const auto idx = g.index_of(u);
      if (idx < smallest) smallest = idx;
      g.for_each_neighbor(u, [&](std::size_t v) {
        if (g.good[v] && comp[v] < 0) {
          comp[v] = next;
          stack.push_back(v);
        }
      });
    }
    if (size > best_size || (size == best_size && smallest < best_min)) {
      best_size = size;
      best_min = smallest;
      best_comp = next;
    }
    ++next;
  }
  for (std::size_t f = 0; f < total; ++f) g.member[f] = comp[f] == best_comp ? 1 : 0;
  g.member_count = best_size;
  return g;
}

/// Side a' = (L/2) / floor((L/2) / a), so that a centered partition of the
/// box into a'-cubes is exact.
inline double adjusted_side(double side, double a) {
  if (!(a > 0.0)) throw ScaleError("requested cube side must be positive");
  const double half = 0.5 * side;
  const double count = std::floor(half / a);
  if (count < 1.0) throw ScaleError("requested cube side does not fit in half the box");
  return half / count;
}

struct DensityReport {
  double density_side = 0.0;      ///< adjusted L^eps
  double occupancy_side = 0.0;    ///< adjusted C_W (log L)^{1/d}
  std::size_t density_cubes = 0;
  std::size_t occupancy_cubes = 0;
  double min_density = 0.0;       ///< min_x |C_L cap V_x| / |V_x|
  bool all_occupied = false;      ///< every occupancy cube holds a point
};

inline DensityReport density_and_occupancy_checks(const PointSet& xi, double cube_side, double eps, double c_w) {
  const int d = xi.dim();
  const double side = xi.side();
  if (!(side > 1.0)) throw ScaleError("density checks need L > 1");
  DensityReport r;
  r.density_side = adjusted_side(side, std::pow(side, eps));
  r.occupancy_side = adjusted_side(side, c_w * std::pow(std::log(side), 1.0 / d));
  const double half = 0.5 * side;

  const auto per_axis = [&](double a) { return static_cast<std::size_t>(std::llround(side / a)); };
  const auto cell_of = [&](double c, double a, std::size_t m) {
    const auto k = static_cast<long long>(std::floor((c + half) / a));
    return static_cast<std::size_t>(std::clamp<long long>(k, 0, static_cast<long long>(m) - 1));
  };

  // (a) grey-cluster volume per density cube, cubes assigned by center.
  const GreyCluster g = grey_cluster(xi, cube_side);
  const std::size_t md = per_axis(r.density_side);
  r.density_cubes = detail::lattice_volume(static_cast<int>(md), d);
  std::vector<double> vol(r.density_cubes, 0.0);
  const double cube_vol = std::pow(cube_side, d);
  for (std::size_t f = 0; f < g.size(); ++f) {
    if (!g.member[f]) continue;
    const auto x = g.index_of(f);
    std::size_t cell = 0;
    std::size_t stride = 1;
    for (int k = 0; k < d; ++k) {
      const double center = (static_cast<double>(x[static_cast<std::size_t>(k)]) + 0.5) * cube_side;
      cell += stride * cell_of(center, r.density_side, md);
      stride *= md;
    }
    vol[cell] += cube_vol;
  }
  const double dvol = std::pow(r.density_side, d);
  r.min_density = std::numeric_limits<double>::infinity();
  for (double v : vol) r.min_density = std::min(r.min_density, v / dvol);

  // (b) every occupancy cube contains a point.
  const std::size_t mo = per_axis(r.occupancy_side);
  r.occupancy_cubes = detail::lattice_volume(static_cast<int>(mo), d);
  std::vector<char> hit(r.occupancy_cubes, 0);
  for (std::size_t i = 0; i < xi.size(); ++i) {
    std::size_t cell = 0;
    std::size_t stride = 1;
    for (int k = 0; k < d; ++k) {
      cell += stride * cell_of(xi[i][k], r.occupancy_side, mo);
      stride *= mo;
    }
    hit[cell] = 1;
  }
  r.all_occupied = std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
  return r;
}

struct BoundaryRatio {
  double boundary = 0.0;  ///< |dA| as volume
  double volume = 0.0;    ///< |A| as volume
  double ratio = 0.0;
};

/// dA = cubes of C_L outside A that are adjacent to A.
inline BoundaryRatio boundary_ratio(const GreyCluster& cluster, const std::vector<std::vector<long long>>& subset) {
  if (subset.empty()) throw InvalidCut("boundary_ratio: A must be nonempty");
  std::vector<char> in(cluster.size(), 0);
  std::size_t count = 0;
  for (const auto& x : subset) {
    const std::size_t f = cluster.flat_of(x);
    if (f == BoxOccupancy::npos || !cluster.member[f]) throw InvalidCut("boundary_ratio: A is not inside the grey cluster");
    if (!in[f]) ++count;
    in[f] = 1;
  }
  std::vector<char> edge(cluster.size(), 0);
  std::size_t boundary = 0;
  for (std::size_t f = 0; f < cluster.size(); ++f) {
    if (!in[f]) continue;
    cluster.for_each_neighbor(f, [&](std::size_t v) {
      if (cluster.member[v] && !in[v] && !edge[v]) {
        edge[v] = 1;
        ++boundary;
      }
    });
  }
  const double cv = std::pow(cluster.cube_side, cluster.dim);
  BoundaryRatio r;
  r.boundary = static_cast<double>(boundary) * cv;
  r.volume = static_cast<double>(count) * cv;
  r.ratio = r.boundary / r.volume;
  return r;
}

/// Random connected sub-collection of the grey cluster of `target` cubes,
/// grown from a uniform member cube by adding uniform frontier cubes.
inline std::vector<std::vector<long long>> sample_connected_subset(const GreyCluster& cluster, std::size_t target,
                                                                   std::uint64_t seed) {
  if (target < 1 || target > cluster.member_count) throw InvalidParameter("sample_connected_subset: bad target size");
  Rng rng(seed, kStreamGrowth);
  std::vector<std::size_t> members;
  for (std::size_t f = 0; f < cluster.size(); ++f) {
    if (cluster.member[f]) members.push_back(f);
  }
  const auto pick = [&](std::size_t m) { return static_cast<std::size_t>(rng.uniform() * static_cast<double>(m)); };
  std::vector<char> in(cluster.size(), 0);
  std::set<std::size_t> frontier;
  std::vector<std::size_t> chosen;
  const auto add = [&](std::size_t f) {
    in[f] = 1;
    chosen.push_back(f);
    frontier.erase(f);
    cluster.for_each_neighbor(f, [&](std::size_t v) {
      if (cluster.member[v] && !in[v]) frontier.insert(v);
    });
  };
  add(members[std::min(pick(members.size()), members.size() - 1)]);
  while (chosen.size() < target) {
    auto it = frontier.begin();
    std::advance(it, static_cast<std::ptrdiff_t>(std::min(pick(frontier.size()), frontier.size() - 1)));
    add(*it);
  }
  std::vector<std::vector<long long>> out;
  for (std::size_t f : chosen) out.push_back(cluster.index_of(f));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace rwlab
