#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rwlab/error.hpp"

namespace rwlab {

/// Axis-aligned closed box [lo_1, hi_1] x ... x [lo_d, hi_d].
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  /// The centered cube of side `side`.
  static Box centered(int dim, double side) {
    return Box{std::vector<double>(dim, -0.5 * side), std::vector<double>(dim, 0.5 * side)};
  }

  [[nodiscard]] int dim() const { return static_cast<int>(lo.size()); }

  [[nodiscard]] bool contains(std::span<const double> x) const {
    for (std::size_t i = 0; i < lo.size(); ++i) {
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    }
    return true;
  }

  [[nodiscard]] bool contains(const Box& other) const {
    for (std::size_t i = 0; i < lo.size(); ++i) {
      if (other.lo[i] < lo[i] || other.hi[i] > hi[i]) return false;
    }
    return true;
  }

  [[nodiscard]] double volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
    return v;
  }
};

/// A finite configuration of distinct points in the closed centered box of
/// side `side`. Immutable once built.
class PointSet {
 public:
  PointSet(int dim, double side, std::vector<double> coords, std::uint64_t seed = 0,
           std::string label = {})
      : dim_(dim), side_(side), coords_(std::move(coords)), seed_(seed), label_(std::move(label)) {
    if (dim_ < 1) throw InvalidParameter("PointSet: dim must be >= 1");
    if (!(side_ > 0.0)) throw InvalidParameter("PointSet: side must be positive");
    if (coords_.size() % static_cast<std::size_t>(dim_) != 0) {
      throw InvalidInput("PointSet: coordinate count is not a multiple of dim");
    }
    const double half = 0.5 * side_;
    for (double c : coords_) {
      if (!std::isfinite(c) || c < -half || c > half) {
        throw InvalidInput("PointSet: point outside the closed box");
      }
    }
    check_distinct();
  }

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] double side() const { return side_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] const std::string& label() const { return label_; }
  [[nodiscard]] std::size_t size() const { return coords_.size() / static_cast<std::size_t>(dim_); }
  [[nodiscard]] bool empty() const { return coords_.empty(); }
  [[nodiscard]] Box box() const { return Box::centered(dim_, side_); }

  [[nodiscard]] std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  [[nodiscard]] std::span<const double> coords() const { return coords_; }

  [[nodiscard]] double distance2(std::size_t i, std::size_t j) const {
    const double* a = coords_.data() + i * static_cast<std::size_t>(dim_);
    const double* b = coords_.data() + j * static_cast<std::size_t>(dim_);
    double s = 0.0;
    for (int k = 0; k < dim_; ++k) {
      const double t = a[k] - b[k];
      s += t * t;
    }
    return s;
  }

  [[nodiscard]] double distance(std::size_t i, std::size_t j) const {
    return std::sqrt(distance2(i, j));
  }

  /// Euclidean norm of point i.
  [[nodiscard]] double norm(std::size_t i) const {
    double s = 0.0;
    for (double c : (*this)[i]) s += c * c;
    return std::sqrt(s);
  }

  /// Number of points inside the closed box `region`.
  [[nodiscard]] std::size_t count_in(const Box& region) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < size(); ++i) c += region.contains((*this)[i]) ? 1 : 0;
    return c;
  }

  friend bool operator==(const PointSet& a, const PointSet& b) {
    return a.dim_ == b.dim_ && a.side_ == b.side_ && a.seed_ == b.seed_ && a.coords_ == b.coords_;
  }

 private:
  void check_distinct() const {
    const std::size_t n = size();
    if (n < 2) return;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto less = [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare((*this)[a].begin(), (*this)[a].end(), (*this)[b].begin(),
                                          (*this)[b].end());
    };
    std::sort(order.begin(), order.end(), less);
    for (std::size_t k = 1; k < n; ++k) {
      if (!less(order[k - 1], order[k])) {
        throw InvalidInput("PointSet: duplicate points (point process must be simple)");
      }
    }
  }

  int dim_;
  double side_;
  std::vector<double> coords_;
  std::uint64_t seed_;
  std::string label_;
};

namespace detail {

inline std::string format_g17(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw InvalidInput("cannot parse number '" + s + "'");
  }
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos != s.size()) throw InvalidInput("trailing characters in number '" + s + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// CSV form:
///
///     # dim=2,side=10,seed=42
///     # label=poisson rho=1
///     x1,x2
///     ...
///
/// One row per point, 17 significant digits. The label line is optional.
inline void write_csv(std::ostream& out, const PointSet& xi) {
  out << "# dim=" << xi.dim() << ",side=" << detail::format_g17(xi.side()) << ",seed=" << xi.seed()
      << '\n';
  if (!xi.label().empty()) out << "# label=" << xi.label() << '\n';
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const auto p = xi[i];
    for (int k = 0; k < xi.dim(); ++k) {
      if (k) out << ',';
      out << detail::format_g17(p[k]);
    }
    out << '\n';
  }
}

inline PointSet read_csv(std::istream& in) {
  std::string line;
  int dim = -1;
  double side = 0.0;
  std::uint64_t seed = 0;
  std::string label;
  std::vector<double> coords;
  bool header = false;
  while (std::getline(in, line)) {
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = detail::trim(line.substr(1));
      if (body.rfind("label=", 0) == 0) {
        label = body.substr(6);
        continue;
      }
      for (const auto& field : detail::split(body, ',')) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = detail::trim(field.substr(0, eq));
        const std::string val = detail::trim(field.substr(eq + 1));
        if (key == "dim") {
          dim = static_cast<int>(detail::parse_double(val));
          header = true;
        } else if (key == "side") {
          side = detail::parse_double(val);
        } else if (key == "seed") {
          seed = std::stoull(val);
        }
      }
      continue;
    }
    if (!header) throw InvalidInput("point CSV: missing '# dim=...,side=...,seed=...' header");
    const auto fields = detail::split(line, ',');
    if (static_cast<int>(fields.size()) != dim) {
      throw InvalidInput("point CSV: row has " + std::to_string(fields.size()) +
                         " fields, expected " + std::to_string(dim));
    }
    for (const auto& f : fields) coords.push_back(detail::parse_double(detail::trim(f)));
  }
  if (!header) throw InvalidInput("point CSV: missing header");
  return PointSet(dim, side, std::move(coords), seed, label);
}

inline void save_csv(const std::string& path, const PointSet& xi) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
  write_csv(out, xi);
}

inline PointSet load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return read_csv(in);
}

}  // namespace rwlab
