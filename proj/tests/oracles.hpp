#pragma once

// Reference computations for the tests. Nothing here calls the library's
// fiber classifier or branch solver.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "nehari/models.hpp"

namespace oracle {

struct ScalarFiber {
  double A, B, C, lambda, p, q, gamma;

  double dphi(double t) const {
    return A * std::pow(t, p - 1) + lambda * B * std::pow(t, gamma - 1) - C * std::pow(t, q - 1);
  }
  double phi(double t) const {
    return A / p * std::pow(t, p) + lambda * B / gamma * std::pow(t, gamma) - C / q * std::pow(t, q);
  }
};

// Roots of phi' on (0, inf) from a log-spaced sign-change scan refined by bisection.
inline std::vector<double> scan_roots(const ScalarFiber& f, int points = 50000) {
  // phi' changes sign only where two of the three terms balance.
  const double s1 = std::pow(f.A / f.C, 1.0 / (f.q - f.p));
  const double s2 = std::pow(f.C / (f.lambda * f.B), 1.0 / (f.gamma - f.q));
  const double lo = std::log(std::min(s1, s2)) - 8.0;
  const double hi = std::log(std::max(s1, s2)) + 8.0;
  auto h = [&](double t) { return f.dphi(t) / std::pow(t, f.p - 1); };
  std::vector<double> roots;
  double t_prev = std::exp(lo);
  double h_prev = h(t_prev);
  for (int i = 1; i <= points; ++i) {
    const double t = std::exp(lo + (hi - lo) * i / points);
    const double hv = h(t);
    if ((h_prev > 0) != (hv > 0)) {
      double a = t_prev, b = t, ha = h_prev;
      for (int k = 0; k < 200 && (b - a) > 1e-15 * b; ++k) {
        const double m = 0.5 * (a + b);
        const double hm = h(m);
        if ((hm > 0) == (ha > 0)) {
          a = m;
          ha = hm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    t_prev = t;
    h_prev = hv;
  }
  return roots;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Full-space descent on Phi_lambda in the H^1 metric with Armijo backtracking.
// Independent of the Nehari reduction: no projection, no fiber roots.
struct FlowResult {
  Eigen::VectorXd u;
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

inline FlowResult gradient_flow(const nehari::Model& model, double lambda, Eigen::VectorXd u, int max_iter = 20000,
                                double tol = 1e-11) {
  const auto& e = model.exps();
  auto energy = [&](const nehari::ModelEval& ev) {
    return ev.P / e.p + lambda * ev.T / e.gamma - ev.Q / e.q;
  };
  auto grad = [&](const nehari::ModelEval& ev) -> Eigen::VectorXd {
    return ev.gradP / e.p + (lambda / e.gamma) * ev.gradT - ev.gradQ / e.q;
  };
  nehari::ModelEval ev = model.eval(u);
  double E = energy(ev);
  double tau = 1.0;
  FlowResult out;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd g = grad(ev);
    const Eigen::VectorXd d = model.metric().riesz(g);
    const double slope = g.dot(d);
    out.residual = std::sqrt(std::max(slope, 0.0)) / model.metric().dual_norm(ev.gradQ);
    out.iterations = it;
    if (out.residual < tol) break;
    tau = std::min(1.0, tau * 2.0);
    for (;;) {
      const Eigen::VectorXd trial = u - tau * d;
      const nehari::ModelEval tv = model.eval(trial);
      const double Et = energy(tv);
      if (Et <= E - 1e-4 * tau * slope || tau < 1e-14) {
        u = trial;
        ev = tv;
        E = Et;
        break;
      }
      tau *= 0.5;
    }
  }
  out.u = u;
  out.energy = E;
  return out;
}

}  // namespace oracle
