#pragma once

// Spectral gap, heat kernel, uniform mixing time, spectral profile and the
// mixing-time upper bounds built from profiles.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rwlab/error.hpp"
#include "rwlab/linalg.hpp"
#include "rwlab/point_set.hpp"
#include "rwlab/profiles.hpp"
#include "rwlab/walk.hpp"

namespace rwlab {

/// Size thresholds for the exact (dense or exhaustive) routines.
struct SizeLimits {
  std::size_t cut_enumeration = 24;
  std::size_t spectral_profile = 18;
  std::size_t dense = 400;
};

enum class SolveMethod { dense, iterative, trivial };

inline const char* to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::dense: return "dense";
    case SolveMethod::iterative: return "iterative";
    case SolveMethod::trivial: return "trivial";
  }
  return "?";
}

struct GapResult {
  double lambda1 = std::numeric_limits<double>::infinity();
  /// Right eigenvector of -L (per-vertex function), ||.||_2 = 1 in the
  /// symmetrized coordinates.
  std::vector<double> eigvec;
  SolveMethod method = SolveMethod::trivial;
  bool trivial = false;  ///< single state: gap undefined, reported as +inf
};

/// Full eigendecomposition of the symmetrized operator.
struct Eigensystem {
  Eigen::VectorXd values;   ///< ascending; values[0] = 0 is the null mode
  Eigen::MatrixXd vectors;  ///< orthonormal columns, column 0 = sqrt(pi)
  std::vector<double> pi;
};

namespace detail {

inline std::vector<double> to_right_eigvec(const WalkGenerator& gen, const Eigen::VectorXd& y) {
  std::vector<double> f(gen.size());
  for (std::size_t i = 0; i < gen.size(); ++i) f[i] = y[static_cast<Eigen::Index>(i)] / std::sqrt(gen.weights()[i]);
  return f;
}

/// Dense eigensystem. The null direction sqrt(pi) is lifted above the
/// spectrum before the solve so that it cannot mix with tiny nonzero
/// eigenvalues; the nonzero eigenvalues are then recomputed as edge-sum
/// Rayleigh quotients of their eigenvectors.
inline Eigensystem dense_eigensystem(const WalkGenerator& gen) {
  Eigen::MatrixXd s = symmetrized_dense(gen);
  const auto n = s.rows();
  Eigen::VectorXd u0(n);
  for (Eigen::Index i = 0; i < n; ++i) u0[i] = std::sqrt(gen.pi()[i]);
  u0.normalize();
  // Eigenvalues of -L are at most twice its largest diagonal entry.
  const double shift = 2.0 * s.diagonal().maxCoeff() + 1.0;
  s += shift * u0 * u0.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success) throw SolverFailure("dense eigensolver failed");
  std::vector<std::pair<double, Eigen::Index>> order;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    Eigen::VectorXd v = es.eigenvectors().col(k);
    v -= u0.dot(v) * u0;
    order.emplace_back(dirichlet_rayleigh(gen, v), k);
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  Eigensystem out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  out.values[0] = 0.0;
  out.vectors.col(0) = u0;
  for (Eigen::Index k = 1; k < n; ++k) {
    out.values[k] = order[static_cast<std::size_t>(k - 1)].first;
    out.vectors.col(k) = es.eigenvectors().col(order[static_cast<std::size_t>(k - 1)].second);
  }
  out.pi = gen.pi();
  return out;
}

/// Eigenvalues below this fraction of the largest diagonal entry of S are
/// handed to the iterative solver when the dense one is asked for the gap.
inline constexpr double kTinyGapRatio = 1e-8;

inline GapResult gap_dense(const WalkGenerator& gen) {
  const Eigensystem es = dense_eigensystem(gen);
  GapResult r;
  r.lambda1 = es.values[1];
  r.eigvec = to_right_eigvec(gen, es.vectors.col(1));
  r.method = SolveMethod::dense;
  return r;
}

}  // namespace detail

/// Smallest nonzero eigenvalue of -L and its eigenvector. Dense for
/// n <= limits.dense (or when forced), deflated Lanczos otherwise.
inline GapResult spectral_gap(const WalkGenerator& gen, const SizeLimits& limits = {},
                              std::optional<SolveMethod> force = std::nullopt) {
  const std::size_t n = gen.size();
  GapResult r;
  if (n == 1) {
    r.trivial = true;
    r.eigvec = {0.0};
    return r;
  }
  require_irreducible(gen.graph());
  SolveMethod method = n <= limits.dense ? SolveMethod::dense : SolveMethod::iterative;
  if (force) method = *force;
  if (n < 3) method = SolveMethod::dense;
  if (method == SolveMethod::dense) {
    GapResult d = detail::gap_dense(gen);
    double scale = 0.0;
    for (std::size_t x = 0; x < n; ++x) scale = std::max(scale, -gen.diag(x));
    if (force || n < 3 || d.lambda1 >= detail::kTinyGapRatio * scale) return d;
  }
  const LanczosResult lz = lanczos_gap(gen);
  r.lambda1 = lz.lambda1;
  r.eigvec = detail::to_right_eigvec(gen, lz.vector);
  r.method = SolveMethod::iterative;
  return r;
}

inline Eigensystem eigensystem(const WalkGenerator& gen, const SizeLimits& limits = {}) {
  if (gen.size() > limits.dense) throw SizeLimit("eigensystem: n exceeds the dense limit");
  require_irreducible(gen.graph());
  return detail::dense_eigensystem(gen);
}

enum class HeatKernelMethod { spectral, pade };

/// H_t = exp(t L), row-stochastic, n*n.
inline Eigen::MatrixXd heat_kernel(const WalkGenerator& gen, double t, HeatKernelMethod method = HeatKernelMethod::spectral,
                                   const SizeLimits& limits = {}) {
  if (!(t >= 0.0)) throw InvalidParameter("heat_kernel: t must be nonnegative");
  if (gen.size() > limits.dense) throw SizeLimit("heat_kernel: n exceeds the dense limit");
  const auto n = static_cast<Eigen::Index>(gen.size());
  if (method == HeatKernelMethod::pade) {
    const auto dense = gen.dense();
    Eigen::MatrixXd l(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) l(i, j) = dense[static_cast<std::size_t>(i * n + j)];
    }
    return expm_pade13(t * l);
  }
  const Eigensystem es = eigensystem(gen, limits);
  Eigen::VectorXd decay = (-t * es.values.array()).exp();
  Eigen::MatrixXd core = es.vectors * decay.asDiagonal() * es.vectors.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) core(i, j) *= std::sqrt(es.pi[j] / es.pi[i]);
  }
  return core;
}

/// sup_{x,y} |H_t(x,y) - nu(y)| / nu(y) for a given kernel.
inline double uniform_distance(const Eigen::MatrixXd& h, const std::vector<double>& pi) {
  double d = 0.0;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      d = std::max(d, std::abs(h(i, j) - pi[j]) / pi[j]);
    }
  }
  return d;
}

/// The same distance from an eigensystem. For a reversible chain the
/// supremum sits on the diagonal (Cauchy-Schwarz on the spectral sum), so
/// this is max_x sum_{k>=1} exp(-lambda_k t) v_k(x)^2 / nu(x).
inline double uniform_distance(const Eigensystem& es, double t) {
  const auto n = es.values.size();
  double d = 0.0;
  for (Eigen::Index x = 0; x < n; ++x) {
    double s = 0.0;
    for (Eigen::Index k = 1; k < n; ++k) {
      const double v = es.vectors(x, k);
      s += std::exp(-es.values[k] * t) * v * v;
    }
    d = std::max(d, s / es.pi[static_cast<std::size_t>(x)]);
  }
  return d;
}

/// Uniform mixing time: first t with uniform_distance <= 1/e, by bisection
/// on [0, 10 gamma (1 + log 1/nu_*)] to relative 1e-6.
inline double mixing_time_exact(const WalkGenerator& gen, const SizeLimits& limits = {}) {
  if (gen.size() > limits.dense) throw SizeLimit("mixing_time_exact: n exceeds the dense limit");
  if (gen.size() == 1) return 0.0;
  const Eigensystem es = eigensystem(gen, limits);
  const double lambda1 = es.values[1];
  const double target = std::exp(-1.0);
  double lo = 0.0;
  double hi = 10.0 / lambda1 * (1.0 + std::log(1.0 / gen.nu_star()));
  if (uniform_distance(es, hi) > target) throw SolverFailure("mixing_time_exact: bracket failed");
  while (hi - lo > 1e-7 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (uniform_distance(es, mid) <= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

/// gamma (1 + log 1/nu_*).
inline double mixing_bound_simple(double gap, double nu_star) {
  return (1.0 / gap) * (1.0 + std::log(1.0 / nu_star));
}

/// Exact spectral profile by enumeration of all nonempty subsets (n <=
/// limits.spectral_profile).
///
/// For a proper subset U, lambda(U) is computed as the bottom of the
/// Dirichlet spectrum on U in the nu-weighted inner product, i.e. the
/// infimum of E(f)/nu(f^2) over f supported in U; the minimizer of each
/// connected block is sign-definite, so the f >= 0 constraint is inactive.
/// Since Var(f) <= nu(f^2) this never exceeds the variance-normalized
/// quantity. The full set enters at r = 1 with value lambda_1.
inline SpectralProfile spectral_profile_exact(const WalkGenerator& gen, const SizeLimits& limits = {}) {
  const std::size_t n = gen.size();
  if (n > limits.spectral_profile) throw SizeLimit("spectral_profile_exact: n exceeds the enumeration limit");
  if (n < 2) throw InvalidParameter("spectral_profile_exact: needs at least two states");
  const GapResult gap = spectral_gap(gen, limits, SolveMethod::dense);

  // Laplacian of stored rates (including edges leaving U on the diagonal).
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t x = 0; x < n; ++x) {
    const auto nb = gen.graph().neighbors(x);
    const auto rt = gen.graph().rates(x);
    double deg = 0.0;
    for (std::size_t k = 0; k < nb.size(); ++k) {
      q(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(nb[k])) = -rt[k];
      deg += rt[k];
    }
    q(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) = deg;
  }
  const auto& w = gen.weights();

  struct Entry {
    double mass;
    double value;
  };
  std::vector<Entry> entries;
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  entries.reserve(static_cast<std::size_t>(full));
  std::vector<Eigen::Index> members;
  for (std::uint64_t mask = 1; mask < full; ++mask) {
    members.clear();
    double mass = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      if (mask >> x & 1U) {
        members.push_back(static_cast<Eigen::Index>(x));
        mass += gen.pi()[x];
      }
    }
    const auto m = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXd a(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        a(i, j) = q(members[i], members[j]) / std::sqrt(w[members[i]] * w[members[j]]);
      }
    }
    double value = 0.0;
    if (m == 1) {
      value = a(0, 0);
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
      value = es.eigenvalues()[0];
    }
    entries.push_back({mass, value});
  }
  entries.push_back({1.0, gap.lambda1});

  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.mass < b.mass; });
  SpectralProfile p;
  p.complete = true;
  double running = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < entries.size()) {
    // Masses equal up to rounding form one breakpoint.
    const double anchor = entries[i].mass;
    std::size_t j = i;
    while (j < entries.size() && entries[j].mass <= anchor * (1.0 + kFractionSlack)) {
      running = std::min(running, entries[j].value);
      ++j;
    }
    if (p.values.empty() || running < p.values.back()) {
      p.breakpoints.push_back(anchor);
      p.values.push_back(running);
    }
    i = j;
  }
  return p;
}

namespace detail {

// Integral of 1/(r * c) over [a, b].
inline double log_piece(double a, double b, double c) { return b > a ? std::log(b / a) / c : 0.0; }

}  // namespace detail

/// 2 int_{4 nu_*}^{4e} dr / (r Lambda(r)), piecewise closed form. Beyond
/// the last breakpoint of an incomplete profile Lambda is extended by
/// (1/2) cheeger^2; a complete profile needs no extension.
inline double mixing_bound_profile_integral(const SpectralProfile& profile, double nu_star, double cheeger = 0.0) {
  const double lo = 4.0 * nu_star;
  const double hi = 4.0 * std::exp(1.0);
  if (profile.breakpoints.empty() || profile.breakpoints.front() > lo * (1.0 + kFractionSlack)) {
    throw CoverageError("spectral profile does not cover 4 nu_*");
  }
  double tail = profile.values.back();
  if (!profile.complete) {
    if (!(cheeger > 0.0)) throw CoverageError("incomplete spectral profile needs the Cheeger constant");
    tail = std::min(tail, 0.5 * cheeger * cheeger);
  }
  double total = 0.0;
  const std::size_t m = profile.breakpoints.size();
  for (std::size_t k = 0; k < m; ++k) {
    const double a = std::max(lo, profile.breakpoints[k]);
    const double b = std::min(hi, k + 1 < m ? profile.breakpoints[k + 1] : hi);
    if (k + 1 == m && !profile.complete) {
      total += detail::log_piece(a, b, tail);
    } else {
      total += detail::log_piece(a, b, profile.values[k]);
    }
  }
  return 2.0 * total;
}

/// 4 int_{4 nu_*}^{4e} dt / (t phibar(t)^2) with phibar = phi on (0, 1/2]
/// and the Cheeger constant above 1/2.
inline double mixing_bound_profile_integral(const IsoProfile& profile, double nu_star, double cheeger) {
  const double lo = 4.0 * nu_star;
  const double hi = 4.0 * std::exp(1.0);
  if (!(cheeger > 0.0)) throw InvalidParameter("isoperimetric bound needs a positive Cheeger constant");
  if (profile.grid.empty() || profile.grid.front() > lo * (1.0 + kFractionSlack)) {
    throw CoverageError("isoperimetric profile does not cover 4 nu_*");
  }
  if (profile.convention == StepConvention::sampled && profile.grid.back() < std::min(0.5, hi)) {
    throw CoverageError("sampled isoperimetric profile does not reach t = 1/2");
  }
  double total = 0.0;
  const double half = 0.5;
  const std::size_t m = profile.grid.size();
  if (lo < half) {
    if (profile.convention == StepConvention::staircase) {
      for (std::size_t k = 0; k < m; ++k) {
        const double a = std::max(lo, profile.grid[k]);
        const double b = std::min(half, k + 1 < m ? profile.grid[k + 1] : half);
        const double v = profile.values[k];
        total += detail::log_piece(a, b, v * v);
      }
    } else {
      // Value at t_k bounds phi from below on (t_{k-1}, t_k].
      double prev = lo;
      for (std::size_t k = 0; k < m && prev < half; ++k) {
        const double b = std::min(half, profile.grid[k]);
        if (b <= prev) continue;
        const double v = profile.values[k];
        total += detail::log_piece(prev, b, v * v);
        prev = b;
      }
    }
  }
  total += detail::log_piece(std::max(lo, half), hi, cheeger * cheeger);
  return 4.0 * total;
}

/// Summary of one spectral run.
struct SpectralReport {
  int model = 1;
  std::size_t n = 0;
  double gap = std::numeric_limits<double>::infinity();
  double poincare = 0.0;
  double nu_star = 0.0;
  std::optional<double> tau_exact;
  double bound_simple = 0.0;
  std::optional<double> bound_profile;
  SolveMethod method = SolveMethod::trivial;
};

/// Gap, Poincare constant, nu_*, simple bound; tau when n <= dense limit;
/// the profile bound when n <= spectral-profile limit.
inline SpectralReport spectral_report(const WalkGenerator& gen, const SizeLimits& limits = {}) {
  SpectralReport r;
  r.model = to_int(gen.model());
  r.n = gen.size();
  r.nu_star = gen.nu_star();
  const GapResult g = spectral_gap(gen, limits);
  r.method = g.method;
  if (g.trivial) {
    r.gap = std::numeric_limits<double>::infinity();
    r.poincare = 0.0;
    r.bound_simple = 0.0;
    r.tau_exact = 0.0;
    return r;
  }
  r.gap = g.lambda1;
  r.poincare = 1.0 / g.lambda1;
  r.bound_simple = mixing_bound_simple(g.lambda1, r.nu_star);
  if (r.n <= limits.dense) r.tau_exact = mixing_time_exact(gen, limits);
  if (r.n <= limits.spectral_profile) {
    r.bound_profile = mixing_bound_profile_integral(spectral_profile_exact(gen, limits), r.nu_star);
  }
  return r;
}

inline void write_report_json(std::ostream& out, const SpectralReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? detail::format_g17(*v) : std::string("null"); };
  auto num = [](double v) {
    // JSON has no infinity; the gap of a one-state chain is reported as null.
    return std::isfinite(v) ? detail::format_g17(v) : std::string("null");
  };
  out << "{\"model\":" << r.model << ",\"n\":" << r.n << ",\"gap\":" << num(r.gap) << ",\"poincare\":" << num(r.poincare)
      << ",\"nu_star\":" << num(r.nu_star) << ",\"tau_exact\":" << opt(r.tau_exact)
      << ",\"bound_simple\":" << num(r.bound_simple) << ",\"bound_profile\":" << opt(r.bound_profile)
      << ",\"method\":\"" << to_string(r.method) << "\"}\n";
}

inline void write_report_csv_header(std::ostream& out) {
  out << "model,n,gap,poincare,nu_star,tau,bound_simple,bound_profile,method\n";
}

inline void write_report_csv_row(std::ostream& out, const SpectralReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? detail::format_g17(*v) : std::string(); };
  out << r.model << ',' << r.n << ',' << detail::format_g17(r.gap) << ',' << detail::format_g17(r.poincare) << ','
      << detail::format_g17(r.nu_star) << ',' << opt(r.tau_exact) << ',' << detail::format_g17(r.bound_simple) << ','
      << opt(r.bound_profile) << ',' << to_string(r.method) << '\n';
}

}  // namespace rwlab
