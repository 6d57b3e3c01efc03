#include "nehari/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nehari/error.hpp"

namespace nehari {

std::vector<double> LambdaGrid::resolve(double lambda_star, double margin) const {
  std::vector<double> out;
  const double scale = relative ? lambda_star : 1.0;
  if (spacing == Spacing::kExplicit) {
    for (double v : values) out.push_back(v * scale);
  } else {
    if (count < 0) throw ValidationError("lambda grid count must be non-negative");
    const double top = hi.value_or(1.0 + margin);
    if (count > 0 && !(lo > 0.0 && top >= lo)) throw ValidationError("lambda grid needs 0 < lo <= hi");
    for (int i = 0; i < count; ++i) {
      const double s = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      const double f = spacing == Spacing::kGeometric ? lo * std::pow(top / lo, s) : lo + (top - lo) * s;
      out.push_back(f * scale);
    }
  }
  for (size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] > 0.0) || !std::isfinite(out[i])) throw ValidationError("lambda grid values must be positive");
    if (i > 0 && !(out[i] > out[i - 1])) throw ValidationError("lambda grid must be sorted ascending");
  }
  return out;
}

std::string LambdaGrid::describe(double margin) const {
  std::ostringstream os;
  os.precision(17);
  switch (spacing) {
    case Spacing::kGeometric:
      os << "geometric(" << count << ";" << lo << ";" << hi.value_or(1.0 + margin) << ")";
      break;
    case Spacing::kLinear:
      os << "linear(" << count << ";" << lo << ";" << hi.value_or(1.0 + margin) << ")";
      break;
    case Spacing::kExplicit:
      os << "explicit(" << values.size() << ")";
      break;
  }
  os << (relative ? "*lambda_star" : "");
  return os.str();
}

namespace {

BranchSummary summarize(const SolveReport& r) { return {r.energy, r.P, r.residual, r.iterations}; }

// Warm start from the previous solution direction, cold multistart on failure.
std::optional<SolveReport> solve_branch(const Model& model, double lambda, Branch branch,
                                        const OptimizerOptions& opts, const std::optional<Eigen::VectorXd>& warm,
                                        const ExtremalReport& ex) {
  if (warm) {
    try {
      OptimizerOptions one = opts;
      one.restarts = 1;
      BranchHints h;
      h.seeds = {*warm};
      h.cold_fallback = false;
      h.lambda0_star = ex.lambda0_star;
      SolveReport r = minimize_branch(model, lambda, branch, one, h);
      if (r.converged) return r;
    } catch (const Error&) {
    }
  }
  try {
    BranchHints h;
    h.seeds = {ex.maximizer.values};
    h.lambda0_star = ex.lambda0_star;
    SolveReport r = minimize_branch(model, lambda, branch, opts, h);
    if (r.converged) return r;
  } catch (const Error&) {
  }
  return std::nullopt;
}

}  // namespace

DiagramReport sweep(const Model& model, const SweepConfig& config, const std::optional<ExtremalReport>& extremal) {
  if (!extremal) throw DependencyError("sweep needs an extremal report (lambda*, lambda0*, maximiser)");
  config.solver_opts.validate();
  const ExtremalReport& ex = *extremal;
  const Exponents& e = model.exps();

  DiagramReport rep;
  rep.model_id = model.id();
  rep.lambda0_star = ex.lambda0_star;
  rep.lambda_star = ex.lambda_star;
  if (const auto c3 = structural_c3(model.spec())) rep.limit_energy_predicted = n0_energy(e, *c3 * ex.lambda_star);

  const std::vector<double> lambdas = config.grid.resolve(ex.lambda_star, config.margin);
  const ModelEval at_max = eval_triple(model, ex.maximizer);

  std::optional<Eigen::VectorXd> warm_plus, warm_minus;
  for (double lambda : lambdas) {
    BifurcationRecord rec;
    rec.lambda = lambda;
    rec.fiber_case_at_maximizer = classify_fiber(at_max.fiber(lambda, e)).tag();
    for (Branch b : {Branch::kPlus, Branch::kMinus}) {
      auto& warm = b == Branch::kPlus ? warm_plus : warm_minus;
      const auto r = solve_branch(model, lambda, b, config.solver_opts,
                                  config.warm_start ? warm : std::optional<Eigen::VectorXd>{}, ex);
      if (r) {
        (b == Branch::kPlus ? rec.plus : rec.minus) = summarize(*r);
        warm = r->solution.values;
      }
    }
    rec.exists = rec.plus.has_value() || rec.minus.has_value();
    rep.records.push_back(std::move(rec));
  }

  for (size_t i = 0; i < rep.records.size(); ++i) {
    if (rep.records[i].exists) {
      rep.lambda_b_empirical = rep.records[i].lambda;
      rep.limit_energy_observed =
          rep.records[i].minus ? std::optional<double>(rep.records[i].minus->energy) : std::nullopt;
      rep.lambda_b_upper = i + 1 < rep.records.size() ? std::optional<double>(rep.records[i + 1].lambda)
                                                      : std::nullopt;
    }
  }
  return rep;
}

ProbeReport nonexistence_probe(const Model& model, double lambda, int directions, std::uint64_t seed,
                               const std::optional<GridFunction>& maximizer) {
  if (!(lambda > 0.0)) throw ValidationError("probe lambda must be positive");
  const Exponents& e = model.exps();
  std::vector<Eigen::VectorXd> rays;
  if (maximizer) rays.push_back(maximizer->values);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < directions; ++i) rays.push_back(random_field(model.grid(), rng));

  ProbeReport rep;
  rep.lambda = lambda;
  int case_iii = 0;
  for (size_t i = 0; i < rays.size(); ++i) {
    const ModelEval ev = model.eval(rays[i]);
    if (!(ev.P > 0.0)) continue;
    const FiberClassification fc = classify_fiber(ev.fiber(lambda, e));
    if (fc.is_case_iii()) ++case_iii;
    if (maximizer && i == 0) rep.maximizer_case = fc.tag();
    ++rep.rays;
  }
  rep.case_iii_fraction = rep.rays > 0 ? static_cast<double>(case_iii) / rep.rays : 0.0;
  return rep;
}

N0Report n0_degenerate_solve(const Model& model, const ExtremalReport& ex, const OptimizerOptions& opts,
                             int max_k) {
  const auto c3 = structural_c3(model.spec());
  if (!c3) throw ValidationError("n0 continuation requires the T = c3 P^{gamma/p} structure");
  const Exponents& e = model.exps();
  {
    const ModelEval ev = eval_triple(model, ex.maximizer);
    const double want = *c3 * std::pow(ev.P, e.gamma / e.p);
    if (std::abs(ev.T - want) > 1e-12 * want) {
      throw HypothesisViolation("T=c3*P^(gamma/p)", "structural identity fails at the maximiser");
    }
  }

  N0Report rep;
  rep.predicted_P = n0_level(e, *c3 * ex.lambda_star);
  rep.predicted_energy = n0_energy(e, *c3 * ex.lambda_star);

  std::optional<Eigen::VectorXd> warm_minus, warm_plus;
  std::optional<SolveReport> last;
  for (int k = 1; k <= max_k; ++k) {
    const double lambda = ex.lambda_star * (1.0 - std::ldexp(1.0, -k));
    std::optional<SolveReport> minus, plus;
    for (Branch b : {Branch::kMinus, Branch::kPlus}) {
      auto& warm = b == Branch::kMinus ? warm_minus : warm_plus;
      BranchHints h;
      h.seeds = warm ? std::vector<Eigen::VectorXd>{*warm, ex.maximizer.values}
                     : std::vector<Eigen::VectorXd>{ex.maximizer.values};
      try {
        SolveReport r = minimize_branch(model, lambda, b, opts, h);
        if (r.converged) {
          warm = r.solution.values;
          (b == Branch::kMinus ? minus : plus) = std::move(r);
        }
      } catch (const Error&) {
      }
    }
    if (!minus) {
      if (k < 5) {
        throw ContinuationFailure("minus branch lost at continuation step k = " + std::to_string(k));
      }
      break;
    }
    ContinuationStep step{k, lambda, plus ? std::optional<double>(plus->energy) : std::nullopt, minus->energy,
                          minus->P};
    if (plus) rep.branch_gap = std::abs(plus->energy - minus->energy) / std::abs(minus->energy);
    rep.steps.push_back(step);
    last = std::move(minus);
  }
  rep.last = *last;

  // P - P* ~ sqrt(lambda* - lambda) and E - E* ~ (lambda* - lambda) near the fold.
  const size_t m = rep.steps.size();
  if (m >= 2) {
    const auto& a = rep.steps[m - 2];
    const auto& b = rep.steps[m - 1];
    const double rp = std::sqrt((ex.lambda_star - b.lambda) / (ex.lambda_star - a.lambda));
    const double re = (ex.lambda_star - b.lambda) / (ex.lambda_star - a.lambda);
    rep.extrapolated_P = (b.P_minus - rp * a.P_minus) / (1.0 - rp);
    rep.extrapolated_energy = (b.energy_minus - re * a.energy_minus) / (1.0 - re);
  } else {
    rep.extrapolated_P = rep.steps.back().P_minus;
    rep.extrapolated_energy = rep.steps.back().energy_minus;
  }
  return rep;
}

}  // namespace nehari
