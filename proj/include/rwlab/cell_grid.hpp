#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rwlab/point_set.hpp"

namespace rwlab::detail {

/// Uniform cell list over a PointSet for fixed-radius neighbor queries.
class CellGrid {
 public:
  CellGrid(const PointSet& xi, double cell) : xi_(xi), dim_(xi.dim()) {
    const double half = 0.5 * xi.side();
    // Cap the cell count so a tiny radius in a big box stays cheap in memory.
    const double max_cells_per_axis =
        std::max(1.0, std::floor(std::pow(4.0 * static_cast<double>(xi.size()) + 16.0, 1.0 / dim_)));
    cells_per_axis_ = static_cast<int>(std::clamp(std::floor(xi.side() / cell), 1.0, max_cells_per_axis));
    cell_ = xi.side() / cells_per_axis_;
    origin_ = -half;
    std::size_t total = 1;
    for (int k = 0; k < dim_; ++k) total *= static_cast<std::size_t>(cells_per_axis_);
    start_.assign(total + 1, 0);
    std::vector<std::size_t> cell_of(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) {
      cell_of[i] = flat(cell_coords(xi[i]));
      ++start_[cell_of[i] + 1];
    }
    for (std::size_t c = 0; c < total; ++c) start_[c + 1] += start_[c];
    members_.resize(xi.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < xi.size(); ++i) members_[fill[cell_of[i]]++] = i;
  }

  /// Calls fn(j) for every point j with |x_j - x| <= radius (including x itself
  /// if it is a point of the set). Order: by cell, then by index.
  template <class Fn>
  void for_each_within(std::span<const double> x, double radius, Fn&& fn) const {
    std::vector<int> lo(dim_), hi(dim_), cur(dim_);
    for (int k = 0; k < dim_; ++k) {
      lo[k] = clamp_cell(static_cast<int>(std::floor((x[k] - radius - origin_) / cell_)));
      hi[k] = clamp_cell(static_cast<int>(std::floor((x[k] + radius - origin_) / cell_)));
    }
    const double r2 = radius * radius;
    cur = lo;
    for (;;) {
      const std::size_t c = flat(cur);
      for (std::size_t m = start_[c]; m < start_[c + 1]; ++m) {
        const std::size_t j = members_[m];
        const auto y = xi_[j];
        double d2 = 0.0;
        for (int k = 0; k < dim_; ++k) {
          const double t = y[k] - x[k];
          d2 += t * t;
        }
        if (d2 <= r2) fn(j, d2);
      }
      int k = 0;
      while (k < dim_ && cur[k] == hi[k]) {
        cur[k] = lo[k];
        ++k;
      }
      if (k == dim_) break;
      ++cur[k];
    }
  }

 private:
  int clamp_cell(int c) const { return std::clamp(c, 0, cells_per_axis_ - 1); }

  std::vector<int> cell_coords(std::span<const double> x) const {
    std::vector<int> c(dim_);
    for (int k = 0; k < dim_; ++k) {
      c[k] = clamp_cell(static_cast<int>(std::floor((x[k] - origin_) / cell_)));
    }
    return c;
  }

  std::size_t flat(const std::vector<int>& c) const {
    std::size_t f = 0;
    for (int k = dim_ - 1; k >= 0; --k) f = f * static_cast<std::size_t>(cells_per_axis_) + c[k];
    return f;
  }

  const PointSet& xi_;
  int dim_;
  int cells_per_axis_ = 1;
  double cell_ = 1.0;
  double origin_ = 0.0;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> members_;
};

}  // namespace rwlab::detail
