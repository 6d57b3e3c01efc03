#pragma once

// Uniform Dirichlet grids on the unit interval / square and the discrete H^1_0
// geometry used by every optimiser: D(u) = u^T K u approximates int |grad u|^2
// with first-order differences and zero ghost nodes.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cstdint>
#include <memory>
#include <random>

namespace nehari {

struct Grid {
  int dim = 1;             // 1 or 2
  int n = 100;             // interior points per axis
  double length = 1.0;     // side of the box

  double h() const { return length / (n + 1); }
  /// Nodal quadrature weight h^dim.
  double weight() const;
  int unknowns() const { return dim == 1 ? n : n * n; }

  void validate() const;
  bool operator==(const Grid&) const = default;
};

struct GridFunction {
  Grid grid;
  Eigen::VectorXd values;

  GridFunction() = default;
  GridFunction(Grid g, Eigen::VectorXd v);
  static GridFunction zeros(const Grid& g) { return {g, Eigen::VectorXd::Zero(g.unknowns())}; }

  /// Nodal coordinates of interior node i along each axis.
  Eigen::Vector2d node(int i) const;
};

/// Sample f at interior nodes.
template <class F>
GridFunction sample(const Grid& g, F&& f) {
  GridFunction u = GridFunction::zeros(g);
  for (int i = 0; i < g.unknowns(); ++i) {
    const auto x = u.node(i);
    u.values[i] = g.dim == 1 ? f(x[0], 0.0) : f(x[0], x[1]);
  }
  return u;
}

/// Discrete Dirichlet integral D(u) = sum over grid edges of h^{dim-2} (u_a - u_b)^2.
double dirichlet_energy(const Grid& g, const Eigen::VectorXd& u);

/// Discrete H^1_0 norm sqrt(D(u)).
double h1_norm(const GridFunction& u);

/// Stiffness matrix K (D(u) = u^T K u) with a cached sparse Cholesky factor.
/// Immutable after construction; safe to share across threads.
class H1Metric {
 public:
  explicit H1Metric(const Grid& g);

  const Grid& grid() const { return grid_; }
  const Eigen::SparseMatrix<double>& stiffness() const { return K_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& u) const { return K_ * u; }
  /// Riesz representative K^{-1} g of a Euclidean gradient.
  Eigen::VectorXd riesz(const Eigen::VectorXd& g) const;
  double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const { return a.dot(K_ * b); }
  double norm(const Eigen::VectorXd& u) const;
  /// Dual norm sqrt(g^T K^{-1} g) of a Euclidean gradient.
  double dual_norm(const Eigen::VectorXd& g) const;

  /// Principal Dirichlet eigenvector by inverse power iteration, unit H^1 norm, positive.
  Eigen::VectorXd principal_eigenvector(int sweeps = 50) const;

 private:
  Grid grid_;
  Eigen::SparseMatrix<double> K_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol_;
};

/// Nodal i.i.d. uniform(-1,1) field smoothed by one weighted Jacobi sweep.
Eigen::VectorXd random_field(const Grid& g, std::mt19937_64& rng);

/// Deterministic per-stream seed derived from (seed, stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace nehari
