#pragma once

// Independent reference computations for the test suites. Everything here is
// deliberately naive: dense matrices, full subset loops, textbook algorithms.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "rwlab/rwlab.hpp"

namespace oracle {

/// Untruncated rate matrix straight from the coordinates.
inline Eigen::MatrixXd rate_matrix(const rwlab::PointSet& xi, double alpha) {
  const auto n = static_cast<Eigen::Index>(xi.size());
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) {
      if (x == y) continue;
      double d2 = 0.0;
      for (int k = 0; k < xi.dim(); ++k) {
        const double t = xi[static_cast<std::size_t>(x)][k] - xi[static_cast<std::size_t>(y)][k];
        d2 += t * t;
      }
      r(x, y) = std::exp(-std::pow(std::sqrt(d2), alpha));
    }
  }
  return r;
}

/// Generator as a dense matrix, from the library's own dense() dump.
inline Eigen::MatrixXd generator(const rwlab::WalkGenerator& gen) {
  const auto n = static_cast<Eigen::Index>(gen.size());
  const auto d = gen.dense();
  Eigen::MatrixXd l(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) l(i, j) = d[static_cast<std::size_t>(i * n + j)];
  }
  return l;
}

struct Cut {
  std::uint64_t mask;
  double weight;
  double count;
  double conductance;
};

/// Every proper nonempty subset with its conductance, flows by double loop
/// over the untruncated rate matrix.
inline std::vector<Cut> all_cuts(const rwlab::WalkGenerator& gen, double alpha) {
  const Eigen::MatrixXd r = rate_matrix(gen.points(), alpha);
  const std::size_t n = gen.size();
  std::vector<Cut> out;
  for (std::uint64_t m = 1; m + 1 < (std::uint64_t{1} << n); ++m) {
    double flow = 0.0, weight = 0.0, count = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      if (!(m >> x & 1U)) continue;
      weight += gen.weights()[x];
      count += 1.0;
      for (std::size_t y = 0; y < n; ++y) {
        if (!(m >> y & 1U)) flow += r(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
      }
    }
    out.push_back({m, weight, count, flow / weight});
  }
  return out;
}

/// min conductance over cuts whose size (weight or count) is at most
/// t times the total, with the library's relative slack.
inline double profile_at(const std::vector<Cut>& cuts, double t, double total, bool by_count) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cuts) {
    const double s = by_count ? c.count : c.weight;
    if (s <= t * total * (1.0 + rwlab::kFractionSlack)) best = std::min(best, c.conductance);
  }
  return best;
}

inline double cheeger(const rwlab::WalkGenerator& gen, double alpha) {
  return profile_at(all_cuts(gen, alpha), 0.5, gen.total_weight(), false);
}

/// (mass, lambda(U)) for every nonempty U, lambda(U) the bottom of the
/// generalized problem Q_U f = lambda W_U f; the full set carries lambda_1
/// of the dense generator.
inline std::vector<std::pair<double, double>> spectral_sets(const rwlab::WalkGenerator& gen) {
  const Eigen::MatrixXd l = generator(gen);
  const auto n = static_cast<Eigen::Index>(gen.size());
  Eigen::MatrixXd q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) q.row(i) = -gen.weights()[static_cast<std::size_t>(i)] * l.row(i);
  q = 0.5 * (q + q.transpose()).eval();
  std::vector<std::pair<double, double>> out;
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  for (std::uint64_t m = 1; m < full; ++m) {
    std::vector<Eigen::Index> idx;
    double mass = 0.0;
    for (Eigen::Index x = 0; x < n; ++x) {
      if (m >> x & 1U) {
        idx.push_back(x);
        mass += gen.pi()[static_cast<std::size_t>(x)];
      }
    }
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd a(k, k), b = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      b(i, i) = gen.weights()[static_cast<std::size_t>(idx[i])];
      for (Eigen::Index j = 0; j < k; ++j) a(i, j) = q(idx[i], idx[j]);
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b, Eigen::EigenvaluesOnly);
    out.emplace_back(mass, es.eigenvalues()[0]);
  }
  Eigen::EigenSolver<Eigen::MatrixXd> full_es(-l);
  std::vector<double> ev;
  for (Eigen::Index i = 0; i < n; ++i) ev.push_back(full_es.eigenvalues()[i].real());
  std::sort(ev.begin(), ev.end());
  out.emplace_back(1.0, ev[1]);
  return out;
}

inline double spectral_profile_at(const std::vector<std::pair<double, double>>& sets, double r) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [mass, value] : sets) {
    if (mass <= r * (1.0 + rwlab::kFractionSlack)) best = std::min(best, value);
  }
  return best;
}

/// sup_{x,y} |H_t(x,y) / nu(y) - 1| from the library's Pade exponential.
inline double sup_distance(const rwlab::WalkGenerator& gen, double t) {
  const Eigen::MatrixXd h = rwlab::expm_pade13(t * generator(gen));
  double d = 0.0;
  for (Eigen::Index x = 0; x < h.rows(); ++x) {
    for (Eigen::Index y = 0; y < h.cols(); ++y) {
      const double p = gen.pi()[static_cast<std::size_t>(y)];
      d = std::max(d, std::abs(h(x, y) - p) / p);
    }
  }
  return d;
}

/// Mixing time by bisection on the brute-force distance, to relative 1e-9.
inline double mixing_time(const rwlab::WalkGenerator& gen, double hi) {
  const double target = std::exp(-1.0);
  while (sup_distance(gen, hi) > target) hi *= 2.0;
  double lo = 0.0;
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    (sup_distance(gen, mid) <= target ? hi : lo) = mid;
  }
  return hi;
}

/// Open clusters by transitive closure of the adjacency relation
/// (Floyd-Warshall on booleans). Returns a canonical class id per site, -1
/// for closed sites; two sites share an id iff they are connected.
inline std::vector<int> closure_classes(const rwlab::SiteField& f) {
  const std::size_t n = f.size();
  std::vector<char> reach(n * n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    if (!f.open[s]) continue;
    reach[s * n + s] = 1;
    for (std::size_t t = 0; t < n; ++t) {
      if (!f.open[t]) continue;
      int dist = 0;
      for (int k = 0; k < f.dim; ++k) dist += std::abs(f.coord(s, k) - f.coord(t, k));
      if (dist == 1) reach[s * n + t] = 1;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i * n + k]) continue;
      for (std::size_t j = 0; j < n; ++j) reach[i * n + j] |= reach[k * n + j];
    }
  }
  std::vector<int> cls(n, -1);
  for (std::size_t s = 0; s < n; ++s) {
    if (!f.open[s]) continue;
    for (std::size_t t = 0; t <= s; ++t) {
      if (reach[s * n + t]) {
        cls[s] = static_cast<int>(t);
        break;
      }
    }
  }
  return cls;
}

/// Disjoint face-to-face paths by repeated DFS augmentation on an explicit
/// split-vertex adjacency matrix (Ford-Fulkerson).
inline int disjoint_paths(const rwlab::SiteField& f, int dir) {
  const int n = static_cast<int>(f.size());
  const int nodes = 2 * n + 2;
  const int s = 2 * n, t = 2 * n + 1;
  std::vector<std::vector<int>> cap(static_cast<std::size_t>(nodes), std::vector<int>(static_cast<std::size_t>(nodes), 0));
  for (int a = 0; a < n; ++a) {
    if (!f.open[static_cast<std::size_t>(a)]) continue;
    cap[2 * a][2 * a + 1] = 1;
    if (f.coord(static_cast<std::size_t>(a), dir) == 0) cap[s][2 * a] = 1;
    if (f.coord(static_cast<std::size_t>(a), dir) == f.n - 1) cap[2 * a + 1][t] = 1;
    for (int b = 0; b < n; ++b) {
      if (!f.open[static_cast<std::size_t>(b)]) continue;
      int dist = 0;
      for (int k = 0; k < f.dim; ++k) dist += std::abs(f.coord(static_cast<std::size_t>(a), k) - f.coord(static_cast<std::size_t>(b), k));
      if (dist == 1) cap[2 * a + 1][2 * b] = 1;
    }
  }
  int flow = 0;
  for (;;) {
    std::vector<int> prev(static_cast<std::size_t>(nodes), -1);
    std::vector<int> stack{s};
    prev[s] = s;
    while (!stack.empty() && prev[t] < 0) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < nodes; ++v) {
        if (cap[u][v] > 0 && prev[v] < 0) {
          prev[v] = u;
          stack.push_back(v);
        }
      }
    }
    if (prev[t] < 0) return flow;
    for (int v = t; v != s; v = prev[v]) {
      --cap[prev[v]][v];
      ++cap[v][prev[v]];
    }
    ++flow;
  }
}

/// True when the open sites minus `removed` still connect the two faces.
inline bool faces_connected(const rwlab::SiteField& f, int dir, const std::vector<char>& removed) {
  const std::size_t n = f.size();
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack;
  for (std::size_t a = 0; a < n; ++a) {
    if (f.open[a] && !removed[a] && f.coord(a, dir) == 0) {
      seen[a] = 1;
      stack.push_back(a);
    }
  }
  while (!stack.empty()) {
    const std::size_t a = stack.back();
    stack.pop_back();
    if (f.coord(a, dir) == f.n - 1) return true;
    for (std::size_t b = 0; b < n; ++b) {
      if (seen[b] || !f.open[b] || removed[b]) continue;
      int dist = 0;
      for (int k = 0; k < f.dim; ++k) dist += std::abs(f.coord(a, k) - f.coord(b, k));
      if (dist == 1) {
        seen[b] = 1;
        stack.push_back(b);
      }
    }
  }
  return false;
}

/// Smallest number of open sites whose closure separates the two faces,
/// by enumerating removal sets of increasing size.
inline int min_vertex_cut(const rwlab::SiteField& f, int dir) {
  std::vector<std::size_t> open;
  for (std::size_t a = 0; a < f.size(); ++a) {
    if (f.open[a]) open.push_back(a);
  }
  std::vector<char> removed(f.size(), 0);
  for (std::size_t k = 0; k <= open.size(); ++k) {
    std::vector<std::size_t> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    for (;;) {
      std::fill(removed.begin(), removed.end(), 0);
      for (std::size_t i : pick) removed[open[i]] = 1;
      if (!faces_connected(f, dir, removed)) return static_cast<int>(k);
      // Next k-combination of open indices.
      std::size_t i = k;
      while (i > 0 && pick[i - 1] == open.size() - k + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return static_cast<int>(open.size());
}

/// Poisson configuration in the box of side `side` with nmin <= n <= nmax,
/// by rejection over derived seeds.
inline rwlab::PointSet small_poisson(std::uint64_t seed, std::size_t nmin, std::size_t nmax, double side = 2.83) {
  for (std::uint64_t k = 0;; ++k) {
    auto xi = rwlab::sample_poisson(1.0, 2, side, seed * 1000 + k);
    if (xi.size() >= nmin && xi.size() <= nmax) return xi;
  }
}

}  // namespace oracle
