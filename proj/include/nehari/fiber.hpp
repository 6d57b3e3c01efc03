#pragma once

// Scalar analysis of the fiber map
//
//   phi(t) = (A/p) t^p + (lambda B/gamma) t^gamma - (C/q) t^q,   t > 0,
//
// i.e. the energy restricted to the ray {t u}. A, B, C are the values of the
// p-, gamma- and q-homogeneous functionals at u. Everything here is a pure
// function of its arguments.

#include <utility>
#include <variant>

namespace nehari {

/// Homogeneity degrees, 1 < p < q < gamma.
struct Exponents {
  double p = 2.0;
  double q = 3.0;
  double gamma = 4.0;

  /// Throws InvalidExponentsError unless 1 < p < q < gamma (all finite).
  void validate() const;
};

struct FiberCoefficients {
  double A = 1.0;
  double B = 1.0;
  double C = 1.0;
  double lambda = 1.0;
  Exponents exps;

  void validate() const;
};

struct CaseI {
  double t_minus;  // local maximum of phi
  double t_plus;   // local minimum of phi
};
struct CaseII {
  double t_deg;
};
struct CaseIII {};

struct FiberClassification {
  std::variant<CaseI, CaseII, CaseIII> shape;
  // h(t_m), the reduced derivative at its interior minimum.
  double margin = 0.0;

  bool is_case_i() const { return std::holds_alternative<CaseI>(shape); }
  bool is_case_ii() const { return std::holds_alternative<CaseII>(shape); }
  bool is_case_iii() const { return std::holds_alternative<CaseIII>(shape); }
  const char* tag() const;  // "I", "II" or "III"
};

/// Relative width of the case II band, |h(t_m)| <= tol * A.
struct DegeneracyTolerance {
  double rel = 1e-10;
};

double eval_fiber(const FiberCoefficients& c, double t);

/// (phi'(t), phi''(t)).
std::pair<double, double> eval_fiber_derivatives(const FiberCoefficients& c, double t);

/// Reduced derivative h(t) = phi'(t) / t^{p-1} = A + lambda B t^{gamma-p} - C t^{q-p}.
double reduced_derivative(const FiberCoefficients& c, double t);

/// Interior minimiser of h.
double reduced_minimizer(const FiberCoefficients& c);

FiberClassification classify_fiber(const FiberCoefficients& c, DegeneracyTolerance tol = {});

/// C(p,q,gamma) = (q/gamma)(q/p)^{(gamma-q)/(q-p)}, the fixed ratio lambda(u)/lambda0(u).
double ratio_constant(const Exponents& e);

/// Prefactor k such that lambda(u) = k * C^{(g-p)/(q-p)} / (B A^{(g-q)/(q-p)}).
double lambda_prefactor(const Exponents& e);
double lambda0_prefactor(const Exponents& e);

/// Degenerate-fiber parameter: the unique lambda at which phi has an inflection critical point.
double rayleigh_lambda(double A, double B, double C, const Exponents& e);

/// Zero-energy parameter: the unique lambda at which min phi = 0.
double rayleigh_lambda0(double A, double B, double C, const Exponents& e);

/// Location of the degenerate critical point for the given lambda.
double rayleigh_t(double A, double B, double C, double lambda, const Exponents& e);

/// Location of the zero-energy critical point for the given lambda.
double rayleigh_t0(double A, double B, double C, double lambda, const Exponents& e);

/// Energy on the degenerate Nehari set for the structure T = c3 P^{gamma/p}:
/// the N0 ceiling ((g-p)/(pqg)) (q-p)^{g/(g-p)} / (g-q)^{p/(g-p)} (c3 lambda)^{-p/(g-p)}.
double n0_energy(const Exponents& e, double c3_lambda);

/// P-level of the degenerate Nehari set for T = c3 P^{gamma/p}: (q-p)/((g-q) c3 lambda).
double n0_level(const Exponents& e, double c3_lambda);

}  // namespace nehari
