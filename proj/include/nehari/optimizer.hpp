#pragma once

// Riemannian gradient ascent on the unit sphere of the discrete H^1_0 norm.
//
// The objectives optimised in this project are 0-homogeneous (Rayleigh-type
// quotients, fibering-reduced energies), so renormalising after each step
// does not change the objective along the ray. Gradients are taken in the
// H^1 metric (K^{-1} g), which keeps the iteration counts independent of the
// mesh width.

#include <cstdint>
#include <functional>
#include <optional>

#include "nehari/grid.hpp"

namespace nehari {

struct OptimizerOptions {
  int max_iter = 5000;
  double grad_tol = 1e-9;   // relative projected-gradient tolerance
  int restarts = 8;
  std::uint64_t seed = 1;
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_increase = 1e-4;
  int threads = 1;

  void validate() const;
};

struct ObjectiveValue {
  double value = 0.0;
  Eigen::VectorXd grad;      // Euclidean gradient w.r.t. nodal values
  double grad_scale = 1.0;   // convergence is ||grad||_* <= grad_tol * grad_scale
  double value_scale = 1.0;  // magnitude of the terms making up `value` (round-off floor)
};

/// Returns nullopt where the objective is undefined (e.g. fiber has no root).
using SphereObjective = std::function<std::optional<ObjectiveValue>(const Eigen::VectorXd&)>;

struct AscentResult {
  Eigen::VectorXd u;          // unit H^1 norm
  double value = 0.0;
  double relative_gradient = 0.0;
  int iterations = 0;
  bool converged = false;
  bool feasible = false;      // start point was in the objective's domain
};

AscentResult maximize_on_sphere(const H1Metric& metric, const SphereObjective& f, Eigen::VectorXd start,
                                const OptimizerOptions& opts);

AscentResult minimize_on_sphere(const H1Metric& metric, const SphereObjective& f, Eigen::VectorXd start,
                                const OptimizerOptions& opts);

/// Runs fn(0..count-1) on up to `threads` workers. Results are written by index,
/// so the outcome does not depend on scheduling. The lowest-index exception is rethrown.
void for_each_index(int count, int threads, const std::function<void(int)>& fn);

}  // namespace nehari
