#include "nehari/grid.hpp"

#include <cmath>
#include <vector>

#include "nehari/error.hpp"

namespace nehari {

double Grid::weight() const { return dim == 1 ? h() : h() * h(); }

void Grid::validate() const {
  if (dim != 1 && dim != 2) throw ValidationError("grid dim must be 1 or 2");
  if (n < 2) throw ValidationError("grid needs n >= 2 interior points per axis");
  if (!(length > 0.0) || !std::isfinite(length)) throw ValidationError("grid length must be positive");
}

GridFunction::GridFunction(Grid g, Eigen::VectorXd v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.unknowns()) {
    throw ValidationError("grid function has " + std::to_string(values.size()) + " values, grid expects " +
                          std::to_string(grid.unknowns()));
  }
  if (!values.allFinite()) throw ValidationError("grid function has non-finite entries");
}

Eigen::Vector2d GridFunction::node(int i) const {
  const double h = grid.h();
  if (grid.dim == 1) return {(i + 1) * h, 0.0};
  return {(i % grid.n + 1) * h, (i / grid.n + 1) * h};
}

double dirichlet_energy(const Grid& g, const Eigen::VectorXd& u) {
  const int n = g.n;
  double s = 0.0;
  if (g.dim == 1) {
    double prev = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = u[i] - prev;
      s += d * d;
      prev = u[i];
    }
    s += prev * prev;
    return s / g.h();
  }
  // x-edges then y-edges, ghost zeros on the boundary.
  for (int j = 0; j < n; ++j) {
    double prev = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = u[j * n + i];
      s += (v - prev) * (v - prev);
      prev = v;
    }
    s += prev * prev;
  }
  for (int i = 0; i < n; ++i) {
    double prev = 0.0;
    for (int j = 0; j < n; ++j) {
      const double v = u[j * n + i];
      s += (v - prev) * (v - prev);
      prev = v;
    }
    s += prev * prev;
  }
  return s;
}

double h1_norm(const GridFunction& u) { return std::sqrt(dirichlet_energy(u.grid, u.values)); }

H1Metric::H1Metric(const Grid& g) : grid_(g) {
  g.validate();
  const int n = g.n;
  const int N = g.unknowns();
  const double scale = g.dim == 1 ? 1.0 / g.h() : 1.0;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(N) * (2 * g.dim + 1));
  for (int k = 0; k < N; ++k) {
    trip.emplace_back(k, k, 2.0 * g.dim * scale);
    const int i = g.dim == 1 ? k : k % n;
    if (i > 0) trip.emplace_back(k, k - 1, -scale);
    if (i < n - 1) trip.emplace_back(k, k + 1, -scale);
    if (g.dim == 2) {
      const int j = k / n;
      if (j > 0) trip.emplace_back(k, k - n, -scale);
      if (j < n - 1) trip.emplace_back(k, k + n, -scale);
    }
  }
  K_.resize(N, N);
  K_.setFromTriplets(trip.begin(), trip.end());
  chol_.compute(K_);
  if (chol_.info() != Eigen::Success) throw EvaluationError("stiffness factorisation failed");
}

Eigen::VectorXd H1Metric::riesz(const Eigen::VectorXd& g) const { return chol_.solve(g); }

double H1Metric::norm(const Eigen::VectorXd& u) const { return std::sqrt(std::max(0.0, inner(u, u))); }

double H1Metric::dual_norm(const Eigen::VectorXd& g) const {
  return std::sqrt(std::max(0.0, g.dot(riesz(g))));
}

Eigen::VectorXd H1Metric::principal_eigenvector(int sweeps) const {
  Eigen::VectorXd u = Eigen::VectorXd::Ones(grid_.unknowns());
  for (int s = 0; s < sweeps; ++s) {
    u = riesz(u);
    u /= norm(u);
  }
  if (u.sum() < 0.0) u = -u;
  return u;
}

Eigen::VectorXd random_field(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int N = g.unknowns();
  Eigen::VectorXd raw(N);
  for (int k = 0; k < N; ++k) raw[k] = unif(rng);
  constexpr double omega = 2.0 / 3.0;
  const int n = g.n;
  Eigen::VectorXd out(N);
  for (int k = 0; k < N; ++k) {
    double sum = 0.0;
    const int i = g.dim == 1 ? k : k % n;
    if (i > 0) sum += raw[k - 1];
    if (i < n - 1) sum += raw[k + 1];
    if (g.dim == 2) {
      const int j = k / n;
      if (j > 0) sum += raw[k - n];
      if (j < n - 1) sum += raw[k + n];
    }
    out[k] = (1.0 - omega) * raw[k] + omega * sum / (2.0 * g.dim);
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 of the combined key
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace nehari
