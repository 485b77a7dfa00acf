#pragma once

// Rate graph exp(-|x-y|^alpha), the three generator normalizations and the
// Dirichlet form.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rwlab/cell_grid.hpp"
#include "rwlab/error.hpp"
#include "rwlab/kernel.hpp"
#include "rwlab/point_set.hpp"

namespace rwlab {

inline constexpr double kDefaultCutoff = 1e-14;

/// Sparse symmetric rate graph in CSR form, columns sorted per row.
class RateGraph {
 public:
  RateGraph(PointSet points, double alpha, double cutoff, std::vector<std::size_t> row_ptr,
            std::vector<std::size_t> cols, std::vector<double> rates)
      : points_(std::move(points)),
        alpha_(alpha),
        cutoff_(cutoff),
        row_ptr_(std::move(row_ptr)),
        cols_(std::move(cols)),
        rates_(std::move(rates)) {}

  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] double cutoff() const { return cutoff_; }
  [[nodiscard]] const PointSet& points() const { return points_; }
  [[nodiscard]] std::size_t edge_count() const { return cols_.size() / 2; }

  [[nodiscard]] std::span<const std::size_t> neighbors(std::size_t x) const {
    return {cols_.data() + row_ptr_[x], row_ptr_[x + 1] - row_ptr_[x]};
  }
  [[nodiscard]] std::span<const double> rates(std::size_t x) const {
    return {rates_.data() + row_ptr_[x], row_ptr_[x + 1] - row_ptr_[x]};
  }

  /// Stored rate, 0 if the edge is absent.
  [[nodiscard]] double rate(std::size_t x, std::size_t y) const {
    const auto nb = neighbors(x);
    const auto it = std::lower_bound(nb.begin(), nb.end(), y);
    if (it == nb.end() || *it != y) return 0.0;
    return rates_[row_ptr_[x] + static_cast<std::size_t>(it - nb.begin())];
  }

  /// Untruncated rate recomputed from coordinates (x != y).
  [[nodiscard]] double exact_rate(std::size_t x, std::size_t y) const {
    return jump_rate(points_.distance2(x, y), alpha_);
  }

  /// Sum of stored rates out of x.
  [[nodiscard]] double stored_degree(std::size_t x) const {
    double s = 0.0;
    for (double r : rates(x)) s += r;
    return s;
  }

  [[nodiscard]] const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  [[nodiscard]] const std::vector<std::size_t>& cols() const { return cols_; }
  [[nodiscard]] const std::vector<double>& all_rates() const { return rates_; }

 private:
  PointSet points_;
  double alpha_;
  double cutoff_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> cols_;
  std::vector<double> rates_;
};

/// Pairwise rates exp(-|x-y|^alpha); edges below `cutoff` are dropped except
/// each vertex's largest-rate edge. Rates that underflow to zero are never
/// stored.
inline RateGraph build_rate_graph(const PointSet& xi, double alpha, double cutoff = kDefaultCutoff) {
  if (!(alpha > 0.0)) throw InvalidParameter("build_rate_graph: alpha must be positive");
  if (!(cutoff >= 0.0 && cutoff < 1.0)) throw InvalidParameter("build_rate_graph: cutoff must lie in [0, 1)");
  const std::size_t n = xi.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);

  auto add = [&](std::size_t i, std::size_t j, double d2) {
    if (d2 == 0.0) throw InvalidInput("build_rate_graph: duplicate points");
    const double r = jump_rate(d2, alpha);
    if (r > 0.0 && r >= cutoff) adj[i].emplace_back(j, r);
  };

  const double radius = cutoff > 0.0 ? std::pow(-std::log(cutoff), 1.0 / alpha) : std::numeric_limits<double>::infinity();
  if (std::isfinite(radius) && radius < 0.5 * xi.side()) {
    const detail::CellGrid grid(xi, radius);
    for (std::size_t i = 0; i < n; ++i) {
      grid.for_each_within(xi[i], radius, [&](std::size_t j, double d2) {
        if (j != i) add(i, j, d2);
      });
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) add(i, j, xi.distance2(i, j));
      }
    }
  }

  // Keep-max: a vertex with no stored edge gets its nearest neighbor back.
  if (n >= 2) {
    std::vector<char> isolated(n);
    for (std::size_t i = 0; i < n; ++i) isolated[i] = adj[i].empty() ? 1 : 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!isolated[i]) continue;
      std::size_t best = n;
      double best_d2 = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double d2 = xi.distance2(i, j);
        if (d2 < best_d2) {
          best_d2 = d2;
          best = j;
        }
      }
      if (best_d2 == 0.0) throw InvalidInput("build_rate_graph: duplicate points");
      const double r = jump_rate(best_d2, alpha);
      if (r > 0.0) {
        adj[i].emplace_back(best, r);
        adj[best].emplace_back(i, r);
      }
    }
  }

  std::vector<std::size_t> row_ptr(n + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<double> rates;
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = adj[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end(),
                          [](const auto& a, const auto& b) { return a.first == b.first; }),
              row.end());
    for (const auto& [j, r] : row) {
      cols.push_back(j);
      rates.push_back(r);
    }
    row_ptr[i + 1] = cols.size();
  }
  return RateGraph(xi, alpha, cutoff, std::move(row_ptr), std::move(cols), std::move(rates));
}

/// The three normalizations: unit weights, full weights sum_z r_{x,z}, and
/// max{1, full weight}.
enum class Model : int { uniform = 1, weighted = 2, hybrid = 3 };

inline Model model_from_int(int i) {
  if (i < 1 || i > 3) throw InvalidModel("model must be 1, 2 or 3 (got " + std::to_string(i) + ")");
  return static_cast<Model>(i);
}

inline int to_int(Model m) { return static_cast<int>(m); }

/// Per-vertex weights w^i_x over stored edges.
inline std::vector<double> vertex_weights(const RateGraph& graph, Model model) {
  const std::size_t n = graph.size();
  if (n == 0) throw InvalidInput("vertex_weights: empty point set");
  std::vector<double> w(n, 1.0);
  if (model == Model::uniform) return w;
  if (model == Model::weighted && n < 2) {
    throw DegenerateModel("model 2 needs at least two points: all weights vanish");
  }
  for (std::size_t x = 0; x < n; ++x) {
    const double full = graph.stored_degree(x);
    if (model == Model::weighted) {
      if (!(full > 0.0)) throw DegenerateModel("model 2: vertex " + std::to_string(x) + " has zero weight");
      w[x] = full;
    } else {
      w[x] = std::max(1.0, full);
    }
  }
  return w;
}

/// Reversible generator L(x,y) = r_{x,y} / w_x with stationary law
/// nu(x) = w_x / sum_z w_z.
class WalkGenerator {
 public:
  WalkGenerator(RateGraph graph, Model model)
      : graph_(std::move(graph)), model_(model), weights_(vertex_weights(graph_, model)) {
    total_weight_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    pi_.resize(weights_.size());
    for (std::size_t x = 0; x < weights_.size(); ++x) pi_[x] = weights_[x] / total_weight_;
    nu_star_ = *std::min_element(pi_.begin(), pi_.end());
  }

  [[nodiscard]] std::size_t size() const { return graph_.size(); }
  [[nodiscard]] Model model() const { return model_; }
  [[nodiscard]] const RateGraph& graph() const { return graph_; }
  [[nodiscard]] const PointSet& points() const { return graph_.points(); }
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
  [[nodiscard]] const std::vector<double>& pi() const { return pi_; }
  [[nodiscard]] double total_weight() const { return total_weight_; }
  [[nodiscard]] double nu_star() const { return nu_star_; }

  /// Off-diagonal entry L(x, y), x != y.
  [[nodiscard]] double offdiag(std::size_t x, std::size_t y) const { return graph_.rate(x, y) / weights_[x]; }

  /// L(x, x) = -sum_{y != x} L(x, y).
  [[nodiscard]] double diag(std::size_t x) const { return -graph_.stored_degree(x) / weights_[x]; }

  /// Dense generator, row-major n*n.
  [[nodiscard]] std::vector<double> dense() const {
    const std::size_t n = size();
    std::vector<double> m(n * n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
      const auto nb = graph_.neighbors(x);
      const auto rt = graph_.rates(x);
      double s = 0.0;
      for (std::size_t k = 0; k < nb.size(); ++k) {
        m[x * n + nb[k]] = rt[k] / weights_[x];
        s += rt[k];
      }
      m[x * n + x] = -s / weights_[x];
    }
    return m;
  }

 private:
  RateGraph graph_;
  Model model_;
  std::vector<double> weights_;
  std::vector<double> pi_;
  double total_weight_ = 0.0;
  double nu_star_ = 0.0;
};

inline WalkGenerator build_generator(const PointSet& xi, double alpha, Model model, double cutoff = kDefaultCutoff) {
  return WalkGenerator(build_rate_graph(xi, alpha, cutoff), model);
}

struct DirichletResult {
  double energy = 0.0;
  double variance = 0.0;
};

/// energy = 1/2 sum_{x,y} nu(x) L(x,y) (f(x) - f(y))^2, variance = Var_nu(f).
inline DirichletResult dirichlet_form(const WalkGenerator& gen, std::span<const double> f) {
  if (f.size() != gen.size()) throw InvalidParameter("dirichlet_form: function size mismatch");
  const auto& g = gen.graph();
  // nu(x) L(x,y) = r_{x,y} / W, symmetric.
  double energy = 0.0;
  for (std::size_t x = 0; x < gen.size(); ++x) {
    const auto nb = g.neighbors(x);
    const auto rt = g.rates(x);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const double df = f[x] - f[nb[k]];
      energy += rt[k] * df * df;
    }
  }
  energy *= 0.5 / gen.total_weight();
  double mean = 0.0;
  for (std::size_t x = 0; x < gen.size(); ++x) mean += gen.pi()[x] * f[x];
  double var = 0.0;
  for (std::size_t x = 0; x < gen.size(); ++x) var += gen.pi()[x] * (f[x] - mean) * (f[x] - mean);
  return {energy, var};
}

/// Debug dump: "x_index,y_index,rate" for stored edges with x < y.
inline void write_generator_edges(std::ostream& out, const WalkGenerator& gen) {
  out << "x_index,y_index,rate\n";
  const auto& g = gen.graph();
  for (std::size_t x = 0; x < gen.size(); ++x) {
    const auto nb = g.neighbors(x);
    const auto rt = g.rates(x);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nb[k] > x) out << x << ',' << nb[k] << ',' << detail::format_g17(rt[k]) << '\n';
    }
  }
}

/// Debug dump: "index,weight,pi".
inline void write_generator_weights(std::ostream& out, const WalkGenerator& gen) {
  out << "index,weight,pi\n";
  for (std::size_t x = 0; x < gen.size(); ++x) {
    out << x << ',' << detail::format_g17(gen.weights()[x]) << ',' << detail::format_g17(gen.pi()[x]) << '\n';
  }
}

}  // namespace rwlab
