#include "nehari/extremal.hpp"

#include <cmath>
#include <vector>

namespace nehari {

LogQuotient lambda_quotient(const Exponents& e) {
  return {-(e.gamma - e.q) / (e.q - e.p), -1.0, (e.gamma - e.p) / (e.q - e.p)};
}

namespace {

SphereObjective log_quotient_objective(const Model& model, const LogQuotient& w) {
  return [&model, w](const Eigen::VectorXd& u) -> std::optional<ObjectiveValue> {
    const ModelEval ev = model.eval(u);
    if (!(ev.P > 0.0 && ev.T > 0.0 && ev.Q > 0.0)) return std::nullopt;
    ObjectiveValue out;
    const double lp = std::log(ev.P), lt = std::log(ev.T), lq = std::log(ev.Q);
    out.value = w.wp * lp + w.wt * lt + w.wq * lq;
    out.grad = (w.wp / ev.P) * ev.gradP + (w.wt / ev.T) * ev.gradT + (w.wq / ev.Q) * ev.gradQ;
    out.value_scale = std::abs(w.wp * lp) + std::abs(w.wt * lt) + std::abs(w.wq * lq);
    out.grad_scale = 1.0;
    return out;
  };
}

GridFunction normalized_field(const Model& model, Eigen::VectorXd u) {
  u /= model.metric().norm(u);
  if (u.sum() < 0.0) u = -u;
  return GridFunction(model.grid(), std::move(u));
}

}  // namespace

QuotientMaximum maximize_log_quotient(const Model& model, const LogQuotient& w, const OptimizerOptions& opts) {
  opts.validate();
  const SphereObjective f = log_quotient_objective(model, w);
  std::vector<AscentResult> runs(opts.restarts);
  for_each_index(opts.restarts, opts.threads, [&](int i) {
    Eigen::VectorXd start;
    if (i == 0) {
      start = model.metric().principal_eigenvector();
    } else {
      std::mt19937_64 rng(derive_seed(opts.seed, static_cast<std::uint64_t>(i)));
      start = random_field(model.grid(), rng);
    }
    runs[i] = maximize_on_sphere(model.metric(), f, std::move(start), opts);
  });

  int best = -1;
  int best_any = -1;
  for (int i = 0; i < opts.restarts; ++i) {
    if (!runs[i].feasible) continue;
    if (best_any < 0 || runs[i].value > runs[best_any].value) best_any = i;
    if (runs[i].converged && (best < 0 || runs[i].value > runs[best].value)) best = i;
  }
  const int pick = best >= 0 ? best : best_any;
  if (pick < 0) throw NonConvergenceError("no feasible restart for the quotient ascent");

  QuotientMaximum out;
  out.log_value = runs[pick].value;
  out.maximizer = normalized_field(model, runs[pick].u);
  out.restarts_used = opts.restarts;
  out.iterations = runs[pick].iterations;
  out.converged = best >= 0;
  out.relative_gradient = runs[pick].relative_gradient;
  return out;
}

namespace {

ExtremalReport report_from(const Model& model, const QuotientMaximum& qm) {
  const Exponents& e = model.exps();
  const ModelEval ev = eval_triple(model, qm.maximizer);
  ExtremalReport rep;
  rep.lambda_star = rayleigh_lambda(ev.P, ev.T, ev.Q, e);
  rep.lambda0_star = rayleigh_lambda0(ev.P, ev.T, ev.Q, e);
  rep.maximizer = qm.maximizer;
  rep.restarts_used = qm.restarts_used;
  rep.iterations = qm.iterations;
  rep.converged = qm.converged;
  rep.relative_gradient = qm.relative_gradient;
  const double c = ratio_constant(e);
  rep.ratio_residual = std::abs(rep.lambda_star / rep.lambda0_star - c) / c;
  return rep;
}

}  // namespace

ExtremalReport maximize_lambda(const Model& model, const OptimizerOptions& opts) {
  QuotientMaximum qm;
  try {
    qm = maximize_log_quotient(model, lambda_quotient(model.exps()), opts);
  } catch (const NonConvergenceError& e) {
    throw ExtremalNonConvergence(e.what(), ExtremalReport{});
  }
  ExtremalReport rep = report_from(model, qm);
  if (!rep.converged) {
    throw ExtremalNonConvergence("lambda* ascent: no restart reached the gradient tolerance (best relative gradient " +
                                     std::to_string(rep.relative_gradient) + ")",
                                 rep);
  }
  return rep;
}

double sobolev_quotient(const Model& model, const GridFunction& u) {
  const ModelEval ev = eval_triple(model, u);
  return ev.Q / std::pow(ev.P, model.exps().q / 2.0);
}

double sobolev_route_lambda_star(const Model& model, const OptimizerOptions& opts) {
  const auto* k = std::get_if<KirchhoffModel>(&model.spec());
  if (!k) throw ValidationError("sobolev route requires the kirchhoff model");
  const double q = k->q;
  const QuotientMaximum qm = maximize_log_quotient(model, {-q / 2.0, 0.0, 1.0}, opts);
  if (!qm.converged) throw NonConvergenceError("sobolev quotient ascent did not converge");
  const double s_max = sobolev_quotient(model, qm.maximizer);
  return lambda_prefactor({2.0, q, 4.0}) * k->a * k->a * std::pow(s_max, 2.0 / (q - 2.0));
}

ModelConstants refine_embedding_constant(const Model& model, ModelConstants constants,
                                         const OptimizerOptions& opts) {
  const double q = model.exps().q;
  const QuotientMaximum qm = maximize_log_quotient(model, {-q / 2.0, 0.0, 1.0}, opts);
  const ModelEval ev = eval_triple(model, qm.maximizer);
  const double norm = h1_norm(qm.maximizer);
  constants.C2 = std::max(constants.C2, ev.Q / std::pow(norm, q));
  return constants;
}

double NepScaling::lambda0_star(double mu) const { return lambda0_coeff * M * std::pow(mu, exponent); }
double NepScaling::lambda_star(double mu) const { return lambda_coeff * M * std::pow(mu, exponent); }

double nep_m_quotient(const Model& model, const GridFunction& u) {
  const auto* nep = std::get_if<NepModel>(&model.spec());
  if (!nep) throw ValidationError("M-quotient requires the nep model");
  const ModelEval ev = eval_triple(model, u);
  const double e = (nep->gamma - 2.0) / (nep->q - 2.0);
  const double b = (nep->gamma - nep->q) / (nep->q - 2.0);
  const double int_q = ev.Q / nep->mu;
  return std::exp(e * std::log(int_q) - std::log(ev.T) - b * std::log(ev.P));
}

NepScaling nep_scaling_constants(const Model& model, const OptimizerOptions& opts) {
  const auto* nep = std::get_if<NepModel>(&model.spec());
  if (!nep) throw ValidationError("nep scaling requires the nep model");
  const Exponents& ex = model.exps();
  // mu only shifts the log-quotient by a constant, so the ascent is mu-free.
  const QuotientMaximum qm = maximize_log_quotient(model, lambda_quotient(ex), opts);
  if (!qm.converged) throw NonConvergenceError("M-quotient ascent did not converge");
  NepScaling s;
  s.M = nep_m_quotient(model, qm.maximizer);
  s.lambda0_coeff = lambda0_prefactor(ex);
  s.lambda_coeff = lambda_prefactor(ex);
  s.exponent = (nep->gamma - 2.0) / (nep->q - 2.0);
  return s;
}

NepCrossings nep_crossings(const NepScaling& s) {
  if (!(s.exponent > 1.0)) throw ValidationError("crossings need (gamma-2)/(q-2) > 1");
  // mu = K mu^e  <=>  mu = K^{-1/(e-1)}
  const double inv = -1.0 / (s.exponent - 1.0);
  NepCrossings c;
  c.mu0 = std::pow(s.lambda_coeff * s.M, inv);
  c.lambda_star_cross = std::pow(s.lambda0_coeff * s.M, inv);
  if (!(c.mu0 < c.lambda_star_cross)) {
    throw NonConvergenceError("crossing order mu0 < lambda_* violated");
  }
  return c;
}

}  // namespace nehari
