#pragma once

// Two solution branches at fixed lambda by fibering reduction. A direction v
// on the unit sphere is sent to t(v) v with t the fiber root of the requested
// branch, and J(v) = Phi_lambda(t(v) v) is minimised over directions.
//
// The Minus branch targets the N- ground state inf{Phi : N-}. That is not the
// mountain-pass level (which is only known to be >= it); outputs label it
// "nminus_ground_state" accordingly.

#include <optional>
#include <string>
#include <vector>

#include "nehari/fiber.hpp"
#include "nehari/models.hpp"
#include "nehari/optimizer.hpp"

namespace nehari {

enum class Branch { kPlus, kMinus };

const char* branch_name(Branch b);
/// Label of the quantity a branch energy approximates.
const char* branch_target_label(Branch b);
Branch parse_branch(const std::string& s);

struct Projection {
  GridFunction point;  // t * u
  double scale = 0.0;  // t
  FiberClassification fiber;
};

/// Throws NoProjectionError (case III) or DegenerateDirectionError (case II).
Projection project_to_nehari(const Model& model, const GridFunction& u, double lambda, Branch branch);

struct SolveReport {
  double lambda = 0.0;
  Branch branch = Branch::kPlus;
  GridFunction solution;
  double energy = 0.0;
  double residual = 0.0;          // ||Phi'(u)||_* / ||Q'(u)||_*
  double nehari_residual = 0.0;   // |P + lambda T - Q| / Q
  double second_order_sign = 0.0; // phi''(1) along the solution ray
  bool converged = false;
  int iterations = 0;
  int restarts_used = 0;
  double P = 0.0;
  double T = 0.0;
  double Q = 0.0;
};

struct BranchHints {
  std::vector<Eigen::VectorXd> seeds;  // tried before the eigenvector and random directions
  std::optional<double> lambda0_star;  // enables the Phi(u_lambda) <= 0 check on Plus
  int max_random_directions = 50;
  bool cold_fallback = true;           // add eigenvector + random directions after the seeds
};

/// Fibering-reduced energy J(v) with its envelope gradient t^p P'/p + lambda t^g T'/g - t^q Q'/q.
SphereObjective reduced_energy(const Model& model, double lambda, Branch branch);

/// Throws EmptyBranchError if no sampled direction projects, NonConvergenceError if
/// none of the started restarts converges, VerificationFailure if the Plus energy is
/// positive in the global-minimiser regime lambda <= lambda0*.
SolveReport minimize_branch(const Model& model, double lambda, Branch branch, const OptimizerOptions& opts,
                            const BranchHints& hints = {});

/// Builds a report for a given point (no optimisation).
SolveReport assess_point(const Model& model, double lambda, Branch branch, const GridFunction& u);

struct SolutionDiagnostics {
  double residual = 0.0;
  double nehari_residual = 0.0;
  double second_order_sign = 0.0;
  double norm = 0.0;
  double norm_bound = 0.0;
  std::optional<double> p_threshold;     // (q-p)/((g-q) c3 lambda)
  std::optional<double> energy_ceiling;  // N0 energy at c3 lambda
};

struct VerifyTolerances {
  double nehari = 1e-8;
  double residual = 1e-6;
  double norm_slack = 1e-9;
};

/// Throws VerificationFailure naming the failed check.
SolutionDiagnostics verify_solution(const Model& model, const SolveReport& report, const ModelConstants& constants,
                                    const VerifyTolerances& tol = {});

}  // namespace nehari
