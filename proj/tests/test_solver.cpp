#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nehari/error.hpp"
#include "nehari/extremal.hpp"
#include "nehari/nehari_solver.hpp"
#include "oracles.hpp"

using namespace nehari;

namespace {

struct Fixture {
  Model model;
  ExtremalReport ex;
  ModelConstants constants;
  explicit Fixture(ModelSpec spec) : model(std::move(spec)) {
    ex = maximize_lambda(model, {});
    constants = refine_embedding_constant(model, verify_hypotheses(model, 50, 3).constants, {});
  }
  SolveReport solve(double lambda, Branch b) const {
    BranchHints h;
    h.seeds = {ex.maximizer.values};
    h.lambda0_star = ex.lambda0_star;
    return minimize_branch(model, lambda, b, {}, h);
  }
};

const Fixture& kirchhoff() {
  static const Fixture f(KirchhoffModel{1.0, 3.0, Grid{1, 100, 1.0}});
  return f;
}
const Fixture& nep() {
  static const Fixture f(NepModel{4.0, 3.0, 1.0, Grid{1, 100, 1.0}});
  return f;
}

}  // namespace

TEST_CASE("branch names") {
  CHECK(parse_branch("plus") == Branch::kPlus);
  CHECK(parse_branch("minus") == Branch::kMinus);
  CHECK_THROWS_AS(parse_branch("up"), ValidationError);
  CHECK(std::string(branch_target_label(Branch::kMinus)) == "nminus_ground_state");
}

TEST_CASE("projection onto the Nehari set") {
  const Fixture& f = kirchhoff();
  const double lambda = 0.5 * f.ex.lambda_star;
  const GridFunction u = f.ex.maximizer;
  for (Branch b : {Branch::kPlus, Branch::kMinus}) {
    const Projection pr = project_to_nehari(f.model, u, lambda, b);
    const ModelEval ev = eval_triple(f.model, pr.point);
    CHECK(std::abs(ev.P + lambda * ev.T - ev.Q) <= 1e-10 * ev.Q);
    // fixed point
    const Projection again = project_to_nehari(f.model, pr.point, lambda, b);
    CHECK(again.scale == doctest::Approx(1.0).epsilon(1e-12));
    // ray dependence only
    const Projection scaled = project_to_nehari(f.model, GridFunction(u.grid, 5.0 * u.values), lambda, b);
    CHECK((scaled.point.values - pr.point.values).norm() <= 1e-12 * pr.point.values.norm());
  }
  const Projection plus = project_to_nehari(f.model, u, lambda, Branch::kPlus);
  const Projection minus = project_to_nehari(f.model, u, lambda, Branch::kMinus);
  CHECK(plus.scale > minus.scale);

  CHECK_THROWS_AS(project_to_nehari(f.model, u, 1.01 * f.ex.lambda_star, Branch::kPlus), NoProjectionError);
  CHECK_THROWS_AS(project_to_nehari(f.model, u, f.ex.lambda_star, Branch::kMinus), DegenerateDirectionError);
  CHECK_THROWS_AS(project_to_nehari(f.model, GridFunction::zeros(u.grid), lambda, Branch::kMinus), ValidationError);
}

TEST_CASE("reduced gradient matches finite differences") {
  for (const Fixture* f : {&kirchhoff(), &nep()}) {
    for (Branch b : {Branch::kPlus, Branch::kMinus}) {
      const double lambda = 0.8 * f->ex.lambda0_star;
      const SphereObjective J = reduced_energy(f->model, lambda, b);
      std::mt19937_64 rng(21);
      Eigen::VectorXd noise = random_field(f->model.grid(), rng);
      noise *= 0.05 / f->model.metric().norm(noise);
      const Eigen::VectorXd v = f->ex.maximizer.values + noise;
      const auto base = J(v);
      REQUIRE(base.has_value());
      for (int k = 0; k < 5; ++k) {
        Eigen::VectorXd d = random_field(f->model.grid(), rng);
        d /= f->model.metric().norm(d);
        const double s = 1e-5 * f->model.metric().norm(v);
        const auto a = J(v + s * d), c = J(v - s * d);
        REQUIRE(a.has_value());
        REQUIRE(c.has_value());
        const double fd = (a->value - c->value) / (2 * s);
        const double exact = base->grad.dot(d);
        const double scale = f->model.metric().dual_norm(base->grad);
        CHECK(std::abs(fd - exact) <= 1e-5 * scale);
      }
    }
  }
}

TEST_CASE("energy regimes on both models") {
  for (const Fixture* f : {&kirchhoff(), &nep()}) {
    const double l0 = f->ex.lambda0_star;
    const double ls = f->ex.lambda_star;
    CAPTURE(f->model.id());

    const SolveReport p1 = f->solve(0.5 * l0, Branch::kPlus);
    const SolveReport m1 = f->solve(0.5 * l0, Branch::kMinus);
    CHECK(p1.energy < 0.0);
    CHECK(m1.energy > 0.0);

    const double mid = 0.5 * (l0 + ls);
    const SolveReport p2 = f->solve(mid, Branch::kPlus);
    const SolveReport m2 = f->solve(mid, Branch::kMinus);
    CHECK(p2.energy > 0.0);
    CHECK(p2.energy < m2.energy);

    const SolveReport p0 = f->solve(l0, Branch::kPlus);
    const SolveReport m0 = f->solve(l0, Branch::kMinus);
    CHECK(std::abs(p0.energy) <= 1e-6 * std::abs(m0.energy));

    for (const SolveReport* r : {&p1, &m1, &p2, &m2, &p0, &m0}) {
      CHECK(r->converged);
      CHECK(r->nehari_residual <= 1e-8);
      CHECK((r->branch == Branch::kPlus ? r->second_order_sign > 0.0 : r->second_order_sign < 0.0));
      CHECK_NOTHROW(verify_solution(f->model, *r, f->constants));
    }
  }
}

TEST_CASE("plus solution agrees with an unconstrained gradient flow") {
  const Fixture& f = kirchhoff();
  for (double frac : {0.5, 1.05}) {
    const double lambda = frac * f.ex.lambda0_star;
    const SolveReport r = f.solve(lambda, Branch::kPlus);
    std::mt19937_64 rng(8);
    Eigen::VectorXd noise = random_field(f.model.grid(), rng);
    noise *= 1e-3 * f.model.metric().norm(r.solution.values) / f.model.metric().norm(noise);
    const oracle::FlowResult flow = oracle::gradient_flow(f.model, lambda, r.solution.values + noise);
    CHECK(flow.residual < 1e-8);
    CHECK(std::abs(flow.energy - r.energy) <= 1e-6 * std::abs(r.energy));
  }
}

TEST_CASE("empty branch above lambda*") {
  const Fixture& f = kirchhoff();
  CHECK_THROWS_AS(f.solve(1.2 * f.ex.lambda_star, Branch::kMinus), EmptyBranchError);
  CHECK_THROWS_AS(minimize_branch(f.model, -1.0, Branch::kPlus, {}), ValidationError);
}

TEST_CASE("verification rejects bad points") {
  const Fixture& f = kirchhoff();
  const double lambda = 0.9 * f.ex.lambda_star;
  SolveReport r = f.solve(lambda, Branch::kMinus);

  SolveReport zero = r;
  zero.solution = GridFunction::zeros(f.model.grid());
  CHECK_THROWS_AS(verify_solution(f.model, zero, f.constants), VerificationFailure);

  SolveReport off = assess_point(f.model, lambda, Branch::kMinus,
                                 GridFunction(f.model.grid(), 1.3 * r.solution.values));
  CHECK_THROWS_WITH_AS(verify_solution(f.model, off, f.constants), doctest::Contains("nehari"), VerificationFailure);

  SolveReport wrong = r;
  wrong.branch = Branch::kPlus;
  CHECK_THROWS_AS(verify_solution(f.model, wrong, f.constants), VerificationFailure);

  const SolutionDiagnostics d = verify_solution(f.model, r, f.constants);
  REQUIRE(d.energy_ceiling.has_value());
  REQUIRE(d.p_threshold.has_value());
  CHECK(r.energy <= *d.energy_ceiling);
  CHECK(r.P < *d.p_threshold);
  CHECK(d.norm >= d.norm_bound);
  CHECK(oracle::rel(*d.p_threshold, n0_level(f.model.exps(), lambda)) < 1e-14);

  const SolveReport p = f.solve(lambda, Branch::kPlus);
  CHECK(p.P > *verify_solution(f.model, p, f.constants).p_threshold);
}

TEST_CASE("2D kirchhoff solve") {
  const Fixture f(KirchhoffModel{1.0, 3.0, Grid{2, 20, 1.0}});
  const SolveReport r = f.solve(0.7 * f.ex.lambda_star, Branch::kMinus);
  CHECK(r.converged);
  CHECK_NOTHROW(verify_solution(f.model, r, f.constants));
}
