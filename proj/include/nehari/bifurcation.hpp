#pragma once

// Lambda sweeps over both branches, the empirical turning point lambda_b,
// non-existence probes, and continuation into the fold at lambda*.
//
// Models with T = c3 P^{gamma/p} are the c3 = 1 problem at parameter c3*lambda,
// so every special-case closed form below is evaluated at c3*lambda.

#include <optional>
#include <string>
#include <vector>

#include "nehari/extremal.hpp"
#include "nehari/nehari_solver.hpp"

namespace nehari {

struct LambdaGrid {
  enum class Spacing { kGeometric, kLinear, kExplicit };
  Spacing spacing = Spacing::kGeometric;
  int count = 64;
  double lo = 0.05;             // multiple of lambda*
  std::optional<double> hi;     // multiple of lambda*; defaults to 1 + margin
  std::vector<double> values;   // kExplicit
  bool relative = true;         // values are multiples of lambda*

  /// Sorted ascending, positive. Throws ValidationError otherwise.
  std::vector<double> resolve(double lambda_star, double margin) const;
  std::string describe(double margin) const;
};

struct SweepConfig {
  LambdaGrid grid;
  OptimizerOptions solver_opts;
  double margin = 0.10;
  bool warm_start = true;
};

struct BranchSummary {
  double energy = 0.0;
  double P = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

struct BifurcationRecord {
  double lambda = 0.0;
  std::optional<BranchSummary> plus;
  std::optional<BranchSummary> minus;
  bool exists = false;
  std::string fiber_case_at_maximizer;  // "I", "II" or "III"
};

struct DiagramReport {
  std::string model_id;
  double lambda0_star = 0.0;
  double lambda_star = 0.0;
  std::optional<double> lambda_b_empirical;   // largest grid lambda with a solution
  std::optional<double> lambda_b_upper;       // next grid lambda (no solution found)
  std::optional<double> limit_energy_predicted;
  std::optional<double> limit_energy_observed;
  std::vector<BifurcationRecord> records;
};

/// Throws DependencyError without an extremal report. Per-lambda failures are recorded.
DiagramReport sweep(const Model& model, const SweepConfig& config, const std::optional<ExtremalReport>& extremal);

struct ProbeReport {
  double lambda = 0.0;
  int rays = 0;                  // random rays plus the maximiser ray
  double case_iii_fraction = 0.0;
  std::string maximizer_case;    // classification on the maximiser ray
};

ProbeReport nonexistence_probe(const Model& model, double lambda, int directions, std::uint64_t seed,
                               const std::optional<GridFunction>& maximizer);

struct ContinuationStep {
  int k = 0;
  double lambda = 0.0;
  std::optional<double> energy_plus;
  double energy_minus = 0.0;
  double P_minus = 0.0;
};

struct N0Report {
  SolveReport last;  // Minus branch at the final continuation step
  std::vector<ContinuationStep> steps;
  double predicted_P = 0.0;       // (q-p)/((g-q) c3 lambda*)
  double predicted_energy = 0.0;  // N0 energy at c3 lambda*
  double extrapolated_P = 0.0;
  double extrapolated_energy = 0.0;
  double branch_gap = 0.0;        // |E+ - E-| / E- at the last step with both branches
};

/// Continues the Minus branch along lambda_k = lambda* (1 - 2^{-k}), k = 1..max_k.
/// Requires the T = c3 P^{gamma/p} structure. Throws ContinuationFailure if a step
/// with k < 5 fails.
N0Report n0_degenerate_solve(const Model& model, const ExtremalReport& extremal, const OptimizerOptions& opts,
                             int max_k = 20);

}  // namespace nehari
