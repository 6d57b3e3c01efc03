#pragma once

// Discretised homogeneous triples (P, T, Q) on Dirichlet grids.
//
//   Kirchhoff:  P = a D(u),  T = D(u)^2,        Q = int |u|^q      (p=2, gamma=4)
//   NEP:        P = D(u),    T = int |u|^gamma,  Q = mu int |u|^q   (p=2)
//
// D is the discrete Dirichlet integral from grid.hpp and integrals use the
// nodal rule with weight h^dim, so each functional is exactly homogeneous in
// the nodal values and every gradient below is the exact derivative.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "nehari/fiber.hpp"
#include "nehari/grid.hpp"

namespace nehari {

struct KirchhoffModel {
  double a = 1.0;
  double q = 3.0;
  Grid grid;
};

struct NepModel {
  double gamma = 4.0;
  double q = 3.0;
  double mu = 1.0;
  Grid grid;
};

using ModelSpec = std::variant<KirchhoffModel, NepModel>;

Exponents exponents(const ModelSpec& spec);
const Grid& model_grid(const ModelSpec& spec);
std::string model_id(const ModelSpec& spec);
/// c3 with T = c3 P^{gamma/p}, when the model has that structure (Kirchhoff: 1/a^2).
std::optional<double> structural_c3(const ModelSpec& spec);
/// Throws ValidationError naming the violated constraint.
void validate(const ModelSpec& spec);

struct ModelEval {
  double P = 0.0;
  double T = 0.0;
  double Q = 0.0;
  Eigen::VectorXd gradP;
  Eigen::VectorXd gradT;
  Eigen::VectorXd gradQ;

  FiberCoefficients fiber(double lambda, const Exponents& e) const { return {P, T, Q, lambda, e}; }
};

/// A validated model plus its H^1 metric. Immutable and shareable.
class Model {
 public:
  explicit Model(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  const Exponents& exps() const { return exps_; }
  const Grid& grid() const { return model_grid(spec_); }
  const H1Metric& metric() const { return *metric_; }
  std::string id() const { return model_id(spec_); }

  ModelEval eval(const Eigen::VectorXd& u) const;
  /// Phi_lambda(u) = P/p + lambda T/gamma - Q/q.
  double energy(const ModelEval& ev, double lambda) const;
  /// Euclidean gradient of Phi_lambda.
  Eigen::VectorXd energy_gradient(const ModelEval& ev, double lambda) const;

 private:
  ModelSpec spec_;
  Exponents exps_;
  std::shared_ptr<const H1Metric> metric_;
};

/// Throws EvaluationError on non-finite values.
ModelEval eval_triple(const Model& model, const GridFunction& u);

struct ModelConstants {
  double C1 = 0.0;    // min P / ||u||^p
  double C2 = 0.0;    // max Q / ||u||^q
  double C_E3 = 0.0;  // max Q^{(g-p)/(q-p)} / (T P^{(g-q)/(q-p)})

  /// (C1/C2)^{1/(q-p)}: lower bound for the norm of any Nehari point.
  double nehari_norm_bound(const Exponents& e) const;
};

struct HypothesisReport {
  ModelConstants constants;
  int samples = 0;
  double max_homogeneity_error = 0.0;  // relative
  double max_euler_error = 0.0;        // relative
  double max_gradient_error = 0.0;     // relative, central differences
  double min_e3_quotient = 0.0;
  double max_kirchhoff_structure_error = 0.0;  // |T a^2 - P^2| / P^2, Kirchhoff only
};

struct HypothesisOptions {
  double homogeneity_tol = 1e-10;
  double euler_tol = 1e-10;
  double gradient_tol = 1e-6;
  int gradient_directions = 5;
};

/// Randomised check of (H), (E1)-(E3), the Euler identities and the gradients.
/// Throws HypothesisViolation naming the failed hypothesis.
HypothesisReport verify_hypotheses(const Model& model, int samples, std::uint64_t seed,
                                   const HypothesisOptions& opts = {});

}  // namespace nehari
