#pragma once

// Extreme parameters lambda* = sup lambda(u) and lambda0* = sup lambda0(u).
// Both maps are 0-homogeneous, so they are maximised over the unit H^1 sphere.

#include "nehari/error.hpp"
#include "nehari/models.hpp"
#include "nehari/optimizer.hpp"

namespace nehari {

struct ExtremalReport {
  double lambda_star = 0.0;
  double lambda0_star = 0.0;
  GridFunction maximizer;  // unit H^1 norm, nonnegative mean
  int restarts_used = 0;
  int iterations = 0;      // iterations of the winning restart
  bool converged = false;
  double ratio_residual = 0.0;  // |lambda*/lambda0* - C(p,q,gamma)| / C(p,q,gamma)
  double relative_gradient = 0.0;
};

struct ExtremalNonConvergence : NonConvergenceError {
  ExtremalNonConvergence(const std::string& w, ExtremalReport best)
      : NonConvergenceError(w), best_so_far(std::move(best)) {}
  ExtremalReport best_so_far;
};

/// Weights of a log-quotient wp log P + wt log T + wq log Q (0-homogeneous when
/// p wp + gamma wt + q wq = 0).
struct LogQuotient {
  double wp = 0.0;
  double wt = 0.0;
  double wq = 0.0;
};

/// log lambda(u) up to its additive constant.
LogQuotient lambda_quotient(const Exponents& e);

struct QuotientMaximum {
  double log_value = 0.0;  // max of the log-quotient
  GridFunction maximizer;
  int restarts_used = 0;
  int iterations = 0;
  bool converged = false;
  double relative_gradient = 0.0;
};

/// Multistart ascent: restart 0 from the principal Dirichlet eigenvector, the
/// rest from seeded random fields. Best converged restart wins, ties broken by index.
/// Throws NonConvergenceError if no restart converges.
QuotientMaximum maximize_log_quotient(const Model& model, const LogQuotient& w, const OptimizerOptions& opts);

/// Projected-gradient ascent of lambda(u); lambda0* follows at the same maximiser.
ExtremalReport maximize_lambda(const Model& model, const OptimizerOptions& opts);

/// Kirchhoff only. With T = P^2/a^2 the degenerate parameter depends on u only through
/// S(u) = Q(u) / P(u)^{q/2}:
///   lambda(u) = k(2,q,4) Q^{2/(q-2)} / (T P^{(4-q)/(q-2)}) = k(2,q,4) a^2 S(u)^{2/(q-2)},
/// so lambda* = k(2,q,4) a^2 S_max^{2/(q-2)} with k the lambda prefactor.
double sobolev_route_lambda_star(const Model& model, const OptimizerOptions& opts);

/// S(u) = Q / P^{q/2} (Kirchhoff).
double sobolev_quotient(const Model& model, const GridFunction& u);

/// Replaces the sampled embedding constant C2 = max Q/||u||^q by the larger of it and
/// the ascent maximum of the same quotient, so the Nehari norm bound is not overstated.
ModelConstants refine_embedding_constant(const Model& model, ModelConstants constants, const OptimizerOptions& opts);

struct NepScaling {
  double M = 0.0;
  double lambda0_coeff = 0.0;
  double lambda_coeff = 0.0;
  double exponent = 0.0;  // (gamma-2)/(q-2)

  double lambda0_star(double mu) const;
  double lambda_star(double mu) const;
};

/// NEP only: M = sup (int|u|^q)^{(g-2)/(q-2)} / (int|u|^g D(u)^{(g-q)/(q-2)}).
NepScaling nep_scaling_constants(const Model& model, const OptimizerOptions& opts);

/// Closed-form M-quotient of a field (NEP only).
double nep_m_quotient(const Model& model, const GridFunction& u);

struct NepCrossings {
  double mu0 = 0.0;                // mu0 = lambda*(mu0)
  double lambda_star_cross = 0.0;  // lambda_* = lambda0*(lambda_*)
};

NepCrossings nep_crossings(const NepScaling& s);

}  // namespace nehari
