#pragma once

// Dense and sparse linear algebra behind the spectral computations.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/LU>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rwlab/error.hpp"
#include "rwlab/rng.hpp"
#include "rwlab/walk.hpp"

namespace rwlab {

/// Connected components of the stored rate graph; labels are numbered in
/// order of their smallest vertex.
inline std::vector<int> connected_components(const RateGraph& g, int* count = nullptr) {
  const std::size_t n = g.size();
  std::vector<int> label(n, -1);
  int next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      for (std::size_t y : g.neighbors(x)) {
        if (label[y] < 0) {
          label[y] = next;
          stack.push_back(y);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return label;
}

/// Throws DisconnectedStateSpace naming the components if the stored graph is
/// reducible.
inline void require_irreducible(const RateGraph& g) {
  int count = 0;
  const auto label = connected_components(g, &count);
  if (count <= 1) return;
  std::vector<std::vector<std::size_t>> comps(count);
  for (std::size_t x = 0; x < label.size(); ++x) comps[label[x]].push_back(x);
  std::string msg = "rate graph has " + std::to_string(count) + " components:";
  for (int c = 0; c < count && c < 8; ++c) {
    msg += " {";
    for (std::size_t k = 0; k < comps[c].size() && k < 6; ++k) {
      msg += (k ? "," : "") + std::to_string(comps[c][k]);
    }
    if (comps[c].size() > 6) msg += ",...";
    msg += "}";
  }
  if (count > 8) msg += " ...";
  throw DisconnectedStateSpace(msg);
}

/// S = W^{-1/2} Q W^{-1/2}, Q the graph Laplacian of the stored rates. S is
/// similar to -L and has null vector sqrt(pi).
inline Eigen::MatrixXd symmetrized_dense(const WalkGenerator& gen) {
  const auto n = static_cast<Eigen::Index>(gen.size());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  const auto& g = gen.graph();
  const auto& w = gen.weights();
  for (Eigen::Index x = 0; x < n; ++x) {
    const auto nb = g.neighbors(static_cast<std::size_t>(x));
    const auto rt = g.rates(static_cast<std::size_t>(x));
    double deg = 0.0;
    for (std::size_t k = 0; k < nb.size(); ++k) {
      s(x, static_cast<Eigen::Index>(nb[k])) = -rt[k] / std::sqrt(w[x] * w[nb[k]]);
      deg += rt[k];
    }
    s(x, x) = deg / w[x];
  }
  return s;
}

/// y = S x for the symmetrized operator, sparse.
inline Eigen::VectorXd apply_symmetrized(const WalkGenerator& gen, const Eigen::VectorXd& x) {
  const auto& g = gen.graph();
  const auto& w = gen.weights();
  Eigen::VectorXd y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto nb = g.neighbors(static_cast<std::size_t>(i));
    const auto rt = g.rates(static_cast<std::size_t>(i));
    const double xi = x[i] / std::sqrt(w[i]);
    double acc = 0.0;
    for (std::size_t k = 0; k < nb.size(); ++k) acc += rt[k] * (xi - x[nb[k]] / std::sqrt(w[nb[k]]));
    y[i] = acc / std::sqrt(w[i]);
  }
  return y;
}

/// Rayleigh quotient <y, S y> / <y, y> evaluated as the edge sum
/// sum_{x<z} r_{xz} (f_x - f_z)^2 / sum_x w_x f_x^2 with f = W^{-1/2} y.
/// Every term is nonnegative, so small eigenvalues keep their relative
/// accuracy where the plain inner product would cancel.
inline double dirichlet_rayleigh(const WalkGenerator& gen, const Eigen::VectorXd& y) {
  const auto& g = gen.graph();
  const auto& w = gen.weights();
  const auto n = static_cast<std::size_t>(y.size());
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = y[static_cast<Eigen::Index>(i)] / std::sqrt(w[i]);
  double num = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    const auto nb = g.neighbors(x);
    const auto rt = g.rates(x);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nb[k] > x) num += rt[k] * (f[x] - f[nb[k]]) * (f[x] - f[nb[k]]);
    }
  }
  return num / y.squaredNorm();
}

/// Matrix exponential exp(A) by scaling and squaring with the degree-13 Pade
/// approximant.
inline Eigen::MatrixXd expm_pade13(const Eigen::MatrixXd& a) {
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;
  const Eigen::Index n = a.rows();
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > theta13) s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const Eigen::MatrixXd as = a / std::ldexp(1.0, s);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd a2 = as * as;
  const Eigen::MatrixXd a4 = a2 * a2;
  const Eigen::MatrixXd a6 = a4 * a2;
  const Eigen::MatrixXd u =
      as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const Eigen::MatrixXd v =
      a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  Eigen::MatrixXd r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

namespace detail {

/// Solves Q x = b for the graph Laplacian Q of a connected graph and a
/// right-hand side with zero sum, by grounding the vertex of largest degree
/// (grounding a nearly isolated vertex would leave a numerically singular
/// block). Dense Cholesky for dense graphs, sparse LDL^T otherwise.
class LaplacianSolver {
 public:
  explicit LaplacianSolver(const RateGraph& g) : n_(static_cast<Eigen::Index>(g.size())) {
    const Eigen::Index m = n_ - 1;
    double best = -1.0;
    for (std::size_t x = 0; x < g.size(); ++x) {
      const double d = g.stored_degree(x);
      if (d > best) {
        best = d;
        ground_ = static_cast<Eigen::Index>(x);
      }
    }
    const auto slot = [this](std::size_t x) {
      const auto i = static_cast<Eigen::Index>(x);
      return i < ground_ ? i : i - 1;
    };
    const double density = static_cast<double>(g.cols().size()) / (static_cast<double>(n_) * static_cast<double>(n_));
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(g.cols().size() + static_cast<std::size_t>(m));
    for (std::size_t x = 0; x < g.size(); ++x) {
      if (static_cast<Eigen::Index>(x) == ground_) continue;
      const auto nb = g.neighbors(x);
      const auto rt = g.rates(x);
      double deg = 0.0;
      for (std::size_t k = 0; k < nb.size(); ++k) {
        deg += rt[k];
        if (static_cast<Eigen::Index>(nb[k]) != ground_) trip.emplace_back(slot(x), slot(nb[k]), -rt[k]);
      }
      trip.emplace_back(slot(x), slot(x), deg);
    }
    if (density > 0.2 && n_ <= 6000) {
      Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m, m);
      for (const auto& t : trip) q(t.row(), t.col()) += t.value();
      dense_.emplace(q);
      if (dense_->info() != Eigen::Success) throw SolverFailure("grounded Laplacian Cholesky failed");
    } else {
      Eigen::SparseMatrix<double> q(m, m);
      q.setFromTriplets(trip.begin(), trip.end());
      sparse_.compute(q);
      if (sparse_.info() != Eigen::Success) throw SolverFailure("grounded Laplacian LDL^T failed");
      use_sparse_ = true;
    }
  }

  [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    const Eigen::Index m = n_ - 1;
    Eigen::VectorXd rhs(m);
    rhs.head(ground_) = b.head(ground_);
    rhs.tail(m - ground_) = b.tail(m - ground_);
    const Eigen::VectorXd y = use_sparse_ ? Eigen::VectorXd(sparse_.solve(rhs)) : Eigen::VectorXd(dense_->solve(rhs));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
    x.head(ground_) = y.head(ground_);
    x.tail(m - ground_) = y.tail(m - ground_);
    return x;
  }

 private:
  Eigen::Index n_;
  Eigen::Index ground_ = 0;
  bool use_sparse_ = false;
  std::optional<Eigen::LLT<Eigen::MatrixXd>> dense_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> sparse_;
};

}  // namespace detail

struct LanczosResult {
  double lambda1 = 0.0;
  Eigen::VectorXd vector;  ///< unit eigenvector of S
  int iterations = 0;
  double residual = 0.0;   ///< ||S v - lambda1 v||
};

/// Smallest nonzero eigenpair of S by Lanczos on the deflated pseudo-inverse
/// M = P W^{1/2} Q^+ W^{1/2} P, P the projector orthogonal to sqrt(pi).
/// The largest eigenvalue of M is 1/lambda1; the final eigenvalue is the
/// Rayleigh quotient of S at the converged Ritz vector, in edge-sum form.
inline LanczosResult lanczos_gap(const WalkGenerator& gen, double tol = 1e-12, int max_iter = 400) {
  const auto n = static_cast<Eigen::Index>(gen.size());
  if (n < 3) throw InvalidParameter("lanczos_gap: needs at least 3 states");
  Eigen::VectorXd sqw(n), u0(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sqw[i] = std::sqrt(gen.weights()[i]);
    u0[i] = std::sqrt(gen.pi()[i]);
  }
  u0.normalize();
  const detail::LaplacianSolver solver(gen.graph());
  auto project = [&](Eigen::VectorXd& v) { v -= u0.dot(v) * u0; };
  auto apply = [&](const Eigen::VectorXd& v) {
    // v is orthogonal to sqrt(pi), so b sums to zero.
    Eigen::VectorXd b = sqw.cwiseProduct(v);
    Eigen::VectorXd x = solver.solve(b);
    Eigen::VectorXd y = sqw.cwiseProduct(x);
    project(y);
    return y;
  };

  const int kmax = static_cast<int>(std::min<Eigen::Index>(max_iter, n - 1));
  Eigen::MatrixXd basis(n, kmax + 1);
  std::vector<double> alpha, beta;
  Rng rng(0x9E3779B97F4A7C15ULL ^ static_cast<std::uint64_t>(n));
  Eigen::VectorXd q(n);
  for (Eigen::Index i = 0; i < n; ++i) q[i] = rng.uniform(-1.0, 1.0);
  project(q);
  q.normalize();
  basis.col(0) = q;

  LanczosResult out;
  for (int k = 0; k < kmax; ++k) {
    Eigen::VectorXd z = apply(basis.col(k));
    const double a = basis.col(k).dot(z);
    alpha.push_back(a);
    // Full reorthogonalization, twice.
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd coef = basis.leftCols(k + 1).transpose() * z;
      z -= basis.leftCols(k + 1) * coef;
      project(z);
    }
    const double bnorm = z.norm();

    const int m = k + 1;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const double theta = es.eigenvalues()[m - 1];
    const double ritz_res = std::abs(bnorm * es.eigenvectors()(m - 1, m - 1));
    const bool invariant = bnorm <= 1e-14 * std::abs(theta);
    if (ritz_res <= tol * std::abs(theta) || invariant || m == kmax) {
      Eigen::VectorXd y = basis.leftCols(m) * es.eigenvectors().col(m - 1);
      project(y);
      y.normalize();
      // One inverse-iteration step in f-space. The solve is not re-centred
      // before the quotient: the edge sum only sees differences, so a trap
      // whose entry dwarfs the rest keeps full relative accuracy.
      const Eigen::VectorXd x = solver.solve(sqw.cwiseProduct(y));
      double mean = 0.0, total = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        mean += gen.weights()[i] * x[i];
        total += gen.weights()[i];
      }
      mean /= total;
      double num = 0.0, den = 0.0;
      for (std::size_t a = 0; a < gen.size(); ++a) {
        const auto nb = gen.graph().neighbors(a);
        const auto rt = gen.graph().rates(a);
        const double xa = x[static_cast<Eigen::Index>(a)];
        for (std::size_t k = 0; k < nb.size(); ++k) {
          const double df = xa - x[static_cast<Eigen::Index>(nb[k])];
          if (nb[k] > a) num += rt[k] * df * df;
        }
        den += gen.weights()[a] * (xa - mean) * (xa - mean);
      }
      y = sqw.cwiseProduct((x.array() - mean).matrix());
      project(y);
      y.normalize();
      const Eigen::VectorXd sy = apply_symmetrized(gen, y);
      out.lambda1 = num / den;
      out.residual = (sy - out.lambda1 * y).norm();
      out.vector = std::move(y);
      out.iterations = m;
      if (m == kmax && !(ritz_res <= 1e-6 * std::abs(theta)) && !invariant) {
        throw SolverFailure("lanczos_gap: no convergence after " + std::to_string(m) + " iterations");
      }
      return out;
    }
    beta.push_back(bnorm);
    basis.col(k + 1) = z / bnorm;
  }
  throw SolverFailure("lanczos_gap: exhausted iterations");
}

}  // namespace rwlab
