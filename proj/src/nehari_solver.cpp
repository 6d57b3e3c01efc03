#include "nehari/nehari_solver.hpp"

#include <cmath>

#include "nehari/error.hpp"

namespace nehari {

const char* branch_name(Branch b) { return b == Branch::kPlus ? "plus" : "minus"; }

const char* branch_target_label(Branch b) {
  return b == Branch::kPlus ? "nplus_ground_state" : "nminus_ground_state";
}

Branch parse_branch(const std::string& s) {
  if (s == "plus" || s == "+") return Branch::kPlus;
  if (s == "minus" || s == "-") return Branch::kMinus;
  throw ValidationError("unknown branch '" + s + "' (expected plus or minus)");
}

namespace {

// Fiber root of the branch, or nullopt outside case I.
std::optional<double> branch_root(const FiberClassification& fc, Branch b) {
  if (const auto* c = std::get_if<CaseI>(&fc.shape)) return b == Branch::kPlus ? c->t_plus : c->t_minus;
  return std::nullopt;
}

bool projects(const Model& model, const Eigen::VectorXd& v, double lambda) {
  const ModelEval ev = model.eval(v);
  if (!(ev.P > 0.0 && ev.T > 0.0 && ev.Q > 0.0)) return false;
  return classify_fiber(ev.fiber(lambda, model.exps())).is_case_i();
}

}  // namespace

Projection project_to_nehari(const Model& model, const GridFunction& u, double lambda, Branch branch) {
  const ModelEval ev = eval_triple(model, u);
  if (!(ev.P > 0.0)) throw ValidationError("cannot project the zero field");
  Projection out;
  out.fiber = classify_fiber(ev.fiber(lambda, model.exps()));
  if (out.fiber.is_case_iii()) {
    throw NoProjectionError("fiber has no critical point along this ray (lambda exceeds lambda(u))");
  }
  if (out.fiber.is_case_ii()) throw DegenerateDirectionError("fiber is degenerate along this ray");
  out.scale = *branch_root(out.fiber, branch);
  out.point = GridFunction(u.grid, out.scale * u.values);
  return out;
}

SphereObjective reduced_energy(const Model& model, double lambda, Branch branch) {
  return [&model, lambda, branch](const Eigen::VectorXd& v) -> std::optional<ObjectiveValue> {
    const ModelEval ev = model.eval(v);
    if (!(ev.P > 0.0 && ev.T > 0.0 && ev.Q > 0.0)) return std::nullopt;
    const Exponents& e = model.exps();
    const FiberCoefficients fc = ev.fiber(lambda, e);
    const auto t = branch_root(classify_fiber(fc), branch);
    if (!t) return std::nullopt;
    const double tp = std::pow(*t, e.p), tg = std::pow(*t, e.gamma), tq = std::pow(*t, e.q);
    ObjectiveValue out;
    out.value = eval_fiber(fc, *t);
    // dJ/dv: the t-derivative of Phi(tv) vanishes at the fiber root.
    out.grad = (tp / e.p) * ev.gradP + (lambda * tg / e.gamma) * ev.gradT - (tq / e.q) * ev.gradQ;
    out.grad_scale = tq * model.metric().dual_norm(ev.gradQ);
    out.value_scale = ev.P * tp / e.p + lambda * ev.T * tg / e.gamma + ev.Q * tq / e.q;
    return out;
  };
}

SolveReport assess_point(const Model& model, double lambda, Branch branch, const GridFunction& u) {
  const ModelEval ev = eval_triple(model, u);
  const Exponents& e = model.exps();
  SolveReport r;
  r.lambda = lambda;
  r.branch = branch;
  r.solution = u;
  r.P = ev.P;
  r.T = ev.T;
  r.Q = ev.Q;
  r.energy = model.energy(ev, lambda);
  const double qn = model.metric().dual_norm(ev.gradQ);
  r.residual = qn > 0.0 ? model.metric().dual_norm(model.energy_gradient(ev, lambda)) / qn
                        : std::numeric_limits<double>::infinity();
  r.nehari_residual = ev.Q > 0.0 ? std::abs(ev.P + lambda * ev.T - ev.Q) / ev.Q
                                 : std::numeric_limits<double>::infinity();
  r.second_order_sign = (e.p - 1.0) * ev.P + lambda * (e.gamma - 1.0) * ev.T - (e.q - 1.0) * ev.Q;
  return r;
}

SolveReport minimize_branch(const Model& model, double lambda, Branch branch, const OptimizerOptions& opts,
                            const BranchHints& hints) {
  opts.validate();
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");

  // Feasible starting directions in a fixed order.
  std::vector<Eigen::VectorXd> starts;
  auto consider = [&](Eigen::VectorXd v) {
    if (static_cast<int>(starts.size()) < opts.restarts && model.metric().norm(v) > 0.0 &&
        projects(model, v, lambda)) {
      starts.push_back(std::move(v));
    }
  };
  for (const auto& s : hints.seeds) consider(s);
  if (hints.cold_fallback) {
    consider(model.metric().principal_eigenvector());
    for (int k = 0; k < hints.max_random_directions && static_cast<int>(starts.size()) < opts.restarts; ++k) {
      std::mt19937_64 rng(derive_seed(opts.seed, 1000 + static_cast<std::uint64_t>(k)));
      consider(random_field(model.grid(), rng));
    }
  }
  if (starts.empty()) {
    throw EmptyBranchError("no sampled direction projects onto the Nehari set at lambda = " +
                           std::to_string(lambda));
  }

  const SphereObjective J = reduced_energy(model, lambda, branch);
  std::vector<AscentResult> runs(starts.size());
  for_each_index(static_cast<int>(starts.size()), opts.threads,
                 [&](int i) { runs[i] = minimize_on_sphere(model.metric(), J, starts[i], opts); });

  int best = -1;
  for (int i = 0; i < static_cast<int>(runs.size()); ++i) {
    if (runs[i].converged && (best < 0 || runs[i].value < runs[best].value)) best = i;
  }
  if (best < 0) {
    double rg = std::numeric_limits<double>::infinity();
    for (const auto& r : runs) rg = std::min(rg, r.relative_gradient);
    throw NonConvergenceError(std::string(branch_name(branch)) + " branch at lambda = " + std::to_string(lambda) +
                              " did not converge (best relative gradient " + std::to_string(rg) + ")");
  }

  Eigen::VectorXd v = runs[best].u;
  if (v.sum() < 0.0) v = -v;
  const Projection proj = project_to_nehari(model, GridFunction(model.grid(), v), lambda, branch);
  SolveReport rep = assess_point(model, lambda, branch, proj.point);
  rep.iterations = runs[best].iterations;
  rep.restarts_used = static_cast<int>(starts.size());
  rep.converged = rep.residual <= opts.grad_tol * (1.0 + 1e-6) && rep.nehari_residual <= 1e-8;

  if (branch == Branch::kPlus && hints.lambda0_star && lambda <= *hints.lambda0_star) {
    const double scale = rep.P / model.exps().p + lambda * rep.T / model.exps().gamma + rep.Q / model.exps().q;
    if (rep.energy > 1e-8 * scale) {
      throw VerificationFailure("global-minimizer-regime",
                                "plus energy " + std::to_string(rep.energy) + " > 0 with lambda <= lambda0*");
    }
  }
  return rep;
}

SolutionDiagnostics verify_solution(const Model& model, const SolveReport& report, const ModelConstants& constants,
                                    const VerifyTolerances& tol) {
  const Exponents& e = model.exps();
  SolutionDiagnostics d;
  d.norm = h1_norm(report.solution);
  if (!(d.norm > 0.0)) throw VerificationFailure("nonzero", "solution is the zero field (not a Nehari point)");

  const SolveReport fresh = assess_point(model, report.lambda, report.branch, report.solution);
  d.residual = fresh.residual;
  d.nehari_residual = fresh.nehari_residual;
  d.second_order_sign = fresh.second_order_sign;
  if (!(d.nehari_residual <= tol.nehari)) {
    throw VerificationFailure("nehari", "identity residual " + std::to_string(d.nehari_residual));
  }
  if (!(d.residual <= tol.residual)) {
    throw VerificationFailure("residual", "full-space residual " + std::to_string(d.residual));
  }
  const bool sign_ok = report.branch == Branch::kPlus ? d.second_order_sign > 0.0 : d.second_order_sign < 0.0;
  if (!sign_ok) {
    throw VerificationFailure("second-order-sign", "phi''(1) = " + std::to_string(d.second_order_sign) +
                                                       " on branch " + branch_name(report.branch));
  }
  d.norm_bound = constants.nehari_norm_bound(e);
  if (!(d.norm >= d.norm_bound * (1.0 - tol.norm_slack))) {
    throw VerificationFailure("norm-bound", "norm " + std::to_string(d.norm) + " below " +
                                                std::to_string(d.norm_bound));
  }

  if (const auto c3 = structural_c3(model.spec())) {
    const double c3l = *c3 * report.lambda;
    d.p_threshold = n0_level(e, c3l);
    d.energy_ceiling = n0_energy(e, c3l);
    const bool side_ok = report.branch == Branch::kPlus ? fresh.P > *d.p_threshold : fresh.P < *d.p_threshold;
    if (!side_ok) {
      throw VerificationFailure("n0-level", "P = " + std::to_string(fresh.P) + " on the wrong side of " +
                                                std::to_string(*d.p_threshold));
    }
    if (!(fresh.energy <= *d.energy_ceiling * (1.0 + 1e-9))) {
      throw VerificationFailure("n0-ceiling", "energy " + std::to_string(fresh.energy) + " above the N0 level " +
                                                  std::to_string(*d.energy_ceiling));
    }
  }
  return d;
}

}  // namespace nehari
