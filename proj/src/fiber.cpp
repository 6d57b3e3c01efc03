#include "nehari/fiber.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nehari/error.hpp"

namespace nehari {

namespace {

double pow_pos(double t, double e) {
  if (!(t > 0.0)) {
    throw ValidationError("fiber evaluation requires t > 0");
  }
  return std::pow(t, e);
}

double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw OverflowError(std::string(what) + ": non-finite result (t too large for the exponents)");
  }
  return v;
}

// h'(t)
double reduced_derivative_slope(const FiberCoefficients& c, double t) {
  const auto& e = c.exps;
  return c.lambda * c.B * (e.gamma - e.p) * pow_pos(t, e.gamma - e.p - 1.0) -
         c.C * (e.q - e.p) * pow_pos(t, e.q - e.p - 1.0);
}

// Root of h on [lo, hi] where sign(h(lo)) != sign(h(hi)).
double bracketed_root(const FiberCoefficients& c, double lo, double hi) {
  double h_lo = reduced_derivative(c, lo);
  while (hi - lo > 1e-8 * hi) {
    const double mid = 0.5 * (lo + hi);
    const double h_mid = reduced_derivative(c, mid);
    if (h_mid == 0.0) return mid;
    if ((h_mid > 0.0) == (h_lo > 0.0)) {
      lo = mid;
      h_lo = h_mid;
    } else {
      hi = mid;
    }
  }
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 50; ++it) {
    const double slope = reduced_derivative_slope(c, t);
    if (slope == 0.0 || !std::isfinite(slope)) break;
    const double step = reduced_derivative(c, t) / slope;
    double next = t - step;
    // Newton stays inside the bisection bracket.
    if (!(next > lo && next < hi)) break;
    t = next;
    if (std::abs(step) <= 1e-14 * t) break;
  }
  return t;
}

}  // namespace

void Exponents::validate() const {
  if (!std::isfinite(p) || !std::isfinite(q) || !std::isfinite(gamma)) {
    throw InvalidExponentsError("exponents must be finite");
  }
  if (!(p > 1.0)) throw InvalidExponentsError("requires p > 1");
  if (!(p < q)) throw InvalidExponentsError("requires p < q");
  if (!(q < gamma)) throw InvalidExponentsError("requires q < gamma");
}

void FiberCoefficients::validate() const {
  exps.validate();
  if (!(A > 0.0 && B > 0.0 && C > 0.0 && lambda > 0.0) ||
      !std::isfinite(A) || !std::isfinite(B) || !std::isfinite(C) || !std::isfinite(lambda)) {
    throw ValidationError("fiber coefficients A, B, C and lambda must be positive and finite");
  }
}

const char* FiberClassification::tag() const {
  if (is_case_i()) return "I";
  if (is_case_ii()) return "II";
  return "III";
}

double eval_fiber(const FiberCoefficients& c, double t) {
  const auto& e = c.exps;
  const double v = c.A / e.p * pow_pos(t, e.p) + c.lambda * c.B / e.gamma * pow_pos(t, e.gamma) -
                   c.C / e.q * pow_pos(t, e.q);
  return finite_or_throw(v, "eval_fiber");
}

std::pair<double, double> eval_fiber_derivatives(const FiberCoefficients& c, double t) {
  const auto& e = c.exps;
  const double d1 = c.A * pow_pos(t, e.p - 1.0) + c.lambda * c.B * pow_pos(t, e.gamma - 1.0) -
                    c.C * pow_pos(t, e.q - 1.0);
  const double d2 = c.A * (e.p - 1.0) * pow_pos(t, e.p - 2.0) +
                    c.lambda * c.B * (e.gamma - 1.0) * pow_pos(t, e.gamma - 2.0) -
                    c.C * (e.q - 1.0) * pow_pos(t, e.q - 2.0);
  return {finite_or_throw(d1, "eval_fiber_derivatives"), finite_or_throw(d2, "eval_fiber_derivatives")};
}

double reduced_derivative(const FiberCoefficients& c, double t) {
  const auto& e = c.exps;
  return finite_or_throw(
      c.A + c.lambda * c.B * pow_pos(t, e.gamma - e.p) - c.C * pow_pos(t, e.q - e.p),
      "reduced_derivative");
}

double reduced_minimizer(const FiberCoefficients& c) {
  const auto& e = c.exps;
  const double tm = std::pow((e.q - e.p) * c.C / ((e.gamma - e.p) * c.lambda * c.B), 1.0 / (e.gamma - e.q));
  if (!std::isfinite(tm) || !(tm > 0.0)) {
    throw InvalidExponentsError("interior minimiser of the reduced derivative is not finite");
  }
  return tm;
}

FiberClassification classify_fiber(const FiberCoefficients& c, DegeneracyTolerance tol) {
  c.validate();
  const double tm = reduced_minimizer(c);
  const double hm = reduced_derivative(c, tm);
  FiberClassification out;
  out.margin = hm;
  if (hm > tol.rel * c.A) {
    out.shape = CaseIII{};
    return out;
  }
  if (std::abs(hm) <= tol.rel * c.A) {
    out.shape = CaseII{tm};
    return out;
  }
  // h(0+) = A > 0 and h -> +inf, so both brackets close.
  double hi = 2.0 * tm;
  const double cap = std::ldexp(tm, 60);
  while (reduced_derivative(c, hi) <= 0.0) {
    hi *= 2.0;
    if (hi > cap) throw OverflowError("upper root bracket exceeded 2^60 t_m");
  }
  const double t_minus = bracketed_root(c, 0.0 + std::numeric_limits<double>::min(), tm);
  const double t_plus = bracketed_root(c, tm, hi);
  out.shape = CaseI{t_minus, t_plus};
  return out;
}

double ratio_constant(const Exponents& e) {
  return e.q / e.gamma * std::pow(e.q / e.p, (e.gamma - e.q) / (e.q - e.p));
}

double lambda_prefactor(const Exponents& e) {
  return (e.q - e.p) / (e.gamma - e.p) *
         std::pow((e.gamma - e.q) / (e.gamma - e.p), (e.gamma - e.q) / (e.q - e.p));
}

double lambda0_prefactor(const Exponents& e) {
  return e.gamma / e.q * (e.q - e.p) / (e.gamma - e.p) *
         std::pow(e.p / e.q * (e.gamma - e.q) / (e.gamma - e.p), (e.gamma - e.q) / (e.q - e.p));
}

namespace {
// C^{(g-p)/(q-p)} / (B A^{(g-q)/(q-p)}), evaluated in logs to delay overflow.
double rayleigh_core(double A, double B, double C, const Exponents& e) {
  if (!(A > 0.0 && B > 0.0 && C > 0.0)) {
    throw ValidationError("Rayleigh values require positive A, B, C");
  }
  const double lg = (e.gamma - e.p) / (e.q - e.p) * std::log(C) - std::log(B) -
                    (e.gamma - e.q) / (e.q - e.p) * std::log(A);
  return finite_or_throw(std::exp(lg), "rayleigh");
}
}  // namespace

double rayleigh_lambda(double A, double B, double C, const Exponents& e) {
  return lambda_prefactor(e) * rayleigh_core(A, B, C, e);
}

double rayleigh_lambda0(double A, double B, double C, const Exponents& e) {
  return lambda0_prefactor(e) * rayleigh_core(A, B, C, e);
}

double rayleigh_t(double A, double B, double C, double lambda, const Exponents& e) {
  (void)A;
  return finite_or_throw(
      std::pow((e.q - e.p) / (e.gamma - e.p) * C / (lambda * B), 1.0 / (e.gamma - e.q)), "rayleigh_t");
}

double rayleigh_t0(double A, double B, double C, double lambda, const Exponents& e) {
  (void)A;
  return finite_or_throw(
      std::pow(e.gamma / e.q * (e.q - e.p) / (e.gamma - e.p) * C / (lambda * B), 1.0 / (e.gamma - e.q)),
      "rayleigh_t0");
}

double n0_energy(const Exponents& e, double c3_lambda) {
  const double gp = e.gamma - e.p;
  return gp / (e.p * e.q * e.gamma) * std::pow(e.q - e.p, e.gamma / gp) /
         std::pow(e.gamma - e.q, e.p / gp) * std::pow(c3_lambda, -e.p / gp);
}

double n0_level(const Exponents& e, double c3_lambda) {
  return (e.q - e.p) / ((e.gamma - e.q) * c3_lambda);
}

}  // namespace nehari
