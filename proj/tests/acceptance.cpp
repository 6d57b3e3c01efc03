// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <unistd.h>

#include "nehari/bifurcation.hpp"
#include "nehari/cli_io.hpp"
#include "nehari/error.hpp"
#include "oracles.hpp"

using namespace nehari;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3e", v);
  return b;
}

Exponents random_exponents(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Exponents e;
  e.p = 1.1 + 2.0 * U(rng);
  e.q = e.p + 0.2 + 2.0 * U(rng);
  e.gamma = e.q + 0.2 + 2.0 * U(rng);
  return e;
}

const Model& kirchhoff_model() {
  static const Model m(KirchhoffModel{1.0, 3.0, Grid{1, 200, 1.0}});
  return m;
}
const ExtremalReport& kirchhoff_extremal() {
  static const ExtremalReport r = maximize_lambda(kirchhoff_model(), {});
  return r;
}
const DiagramReport& kirchhoff_diagram() {
  static const DiagramReport d = sweep(kirchhoff_model(), {}, kirchhoff_extremal());
  return d;
}

Outcome fiber_oracle() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  int n = 0;
  for (int i = 0; i < 1000; ++i) {
    const Exponents e = random_exponents(rng);
    auto logu = [&] { return std::exp(std::log(10.0) * (2 * U(rng) - 1)); };
    const double A = logu(), B = logu(), C = logu();
    double r = std::exp(std::log(20.0) * (2 * U(rng) - 1));
    if (r > 0.99 && r < 1.01) continue;  // degeneracy band
    const double lambda = r * rayleigh_lambda(A, B, C, e);
    const auto cls = classify_fiber({A, B, C, lambda, e});
    const auto roots = oracle::scan_roots({A, B, C, lambda, e.p, e.q, e.gamma});
    ++n;
    if (cls.is_case_i()) {
      o.require(roots.size() == 2, "root count mismatch (case I)");
      if (roots.size() == 2) {
        const auto& c = std::get<CaseI>(cls.shape);
        worst = std::max({worst, oracle::rel(c.t_minus, roots[0]), oracle::rel(c.t_plus, roots[1])});
      }
    } else {
      o.require(cls.is_case_iii() && roots.empty(), "root count mismatch (case III)");
    }
  }
  const double secs = seconds_since(t0);
  o.require(n >= 990, "too few samples outside the band");
  o.require(worst <= 1e-6, "root location error " + fmt(worst));
  o.require(secs <= 10.0, "runtime " + fmt(secs) + " s");
  if (o.ok) o.detail = std::to_string(n) + " samples, max root error " + fmt(worst) + ", " + fmt(secs) + " s";
  return o;
}

Outcome closed_forms() {
  Outcome o;
  const Exponents e{2.0, 3.0, 4.0};
  const double l = rayleigh_lambda(1, 1, 1, e), l0 = rayleigh_lambda0(1, 1, 1, e);
  const double t = rayleigh_t(1, 1, 1, 0.25, e), t0 = rayleigh_t0(1, 1, 1, 2.0 / 9.0, e);
  o.require(std::abs(l - 0.25) <= 1e-12, "lambda(u)");
  o.require(std::abs(l0 - 2.0 / 9.0) <= 1e-12, "lambda0(u)");
  o.require(std::abs(t - 2.0) <= 1e-12, "t(u)");
  o.require(std::abs(t0 - 3.0) <= 1e-12, "t0(u)");
  // direct substitution
  const oracle::ScalarFiber deg{1, 1, 1, 0.25, 2, 3, 4}, zero{1, 1, 1, 2.0 / 9.0, 2, 3, 4};
  o.require(std::abs(deg.dphi(2.0)) <= 1e-12, "phi'(2) at lambda 1/4");
  o.require(std::abs(1.0 + 3 * 0.25 * 4.0 - 2 * 2.0) <= 1e-12, "phi''(2) at lambda 1/4");
  o.require(std::abs(zero.phi(3.0)) <= 1e-12 && std::abs(zero.dphi(3.0)) <= 1e-12, "phi(3), phi'(3) at lambda 2/9");
  if (o.ok) o.detail = "lambda=0.25, lambda0=2/9, t=2, t0=3";
  return o;
}

Outcome ratio_law() {
  Outcome o;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(0.1, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Exponents e = random_exponents(rng);
    const double A = U(rng), B = U(rng), C = U(rng);
    const double want = (e.q / e.gamma) * std::pow(e.q / e.p, (e.gamma - e.q) / (e.q - e.p));
    worst = std::max(worst, oracle::rel(rayleigh_lambda(A, B, C, e) / rayleigh_lambda0(A, B, C, e), want));
  }
  o.require(worst <= 1e-12, "scalar ratio error " + fmt(worst));
  const double rk = kirchhoff_extremal().ratio_residual;
  const double rn = maximize_lambda(Model(NepModel{4.0, 3.0, 1.0, Grid{1, 100, 1.0}}), {}).ratio_residual;
  o.require(rk <= 1e-8 && rn <= 1e-8, "extremal ratio residual");
  if (o.ok) o.detail = "scalar " + fmt(worst) + ", extremal " + fmt(std::max(rk, rn));
  return o;
}

Outcome kirchhoff_two_routes() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const double direct = kirchhoff_extremal().lambda_star;
  const double sob = sobolev_route_lambda_star(kirchhoff_model(), {});
  const double agree = oracle::rel(sob, direct);
  o.require(agree <= 1e-6, "routes differ by " + fmt(agree));
  std::vector<double> ls;
  for (int n : {100, 200, 400}) ls.push_back(maximize_lambda(Model(KirchhoffModel{1.0, 3.0, Grid{1, n, 1.0}}), {}).lambda_star);
  const double d1 = ls[0] - ls[1], d2 = ls[1] - ls[2];
  o.require(d1 * d2 > 0.0, "refinement not monotone");
  o.require(std::abs(d1) >= 3.0 * std::abs(d2), "differences shrink by only " + fmt(d1 / d2));
  const double secs = seconds_since(t0);
  o.require(secs <= 60.0, "runtime " + fmt(secs) + " s");
  if (o.ok) {
    o.detail = "lambda*=" + fmt(direct) + ", routes " + fmt(agree) + ", difference ratio " + fmt(d1 / d2);
  }
  return o;
}

Outcome kirchhoff_regimes() {
  Outcome o;
  const DiagramReport& d = kirchhoff_diagram();
  int changes = 0;
  std::optional<bool> prev;
  double prev_lambda = 0.0, lo = 0.0, hi = 0.0;
  for (const auto& r : d.records) {
    if (r.lambda < d.lambda0_star) o.require(r.plus && r.plus->energy < 0.0, "plus energy not negative below lambda0*");
    if (r.lambda > d.lambda0_star && d.lambda_b_empirical && r.lambda <= *d.lambda_b_empirical) {
      o.require(r.plus && r.minus, "missing branch on (lambda0*, lambda_b]");
      if (r.plus && r.minus) {
        o.require(r.plus->energy > 0.0 && r.plus->energy < r.minus->energy, "energy ordering on (lambda0*, lambda_b]");
      }
    }
    if (r.plus) {
      const bool pos = r.plus->energy > 0.0;
      if (prev && *prev != pos) {
        ++changes;
        lo = prev_lambda;
        hi = r.lambda;
      }
      prev = pos;
      prev_lambda = r.lambda;
    }
  }
  o.require(changes == 1, "plus energy changes sign " + std::to_string(changes) + " times");
  o.require(lo <= d.lambda0_star && d.lambda0_star <= hi, "zero crossing not in the cell containing lambda0*");
  const auto& ex = kirchhoff_extremal();
  const ProbeReport p = nonexistence_probe(kirchhoff_model(), 1.05 * ex.lambda_star, 200, 3, ex.maximizer);
  o.require(p.case_iii_fraction == 1.0, "probe case III fraction " + fmt(p.case_iii_fraction));
  if (o.ok) o.detail = "crossing in [" + fmt(lo) + ", " + fmt(hi) + "], probe fraction 1.0 over " +
                       std::to_string(p.rays) + " rays";
  return o;
}

Outcome kirchhoff_fold() {
  Outcome o;
  const auto& ex = kirchhoff_extremal();
  const N0Report r = n0_degenerate_solve(kirchhoff_model(), ex, {});
  const double a = 1.0, q = 3.0, ls = ex.lambda_star;
  const double e_want = (q - 2) * (q - 2) / (4 * q * (4 - q)) * a * a / ls;
  const double p_want = (q - 2) * a * a / ((4 - q) * ls);
  const double e_err = oracle::rel(r.last.energy, e_want);
  const double p_err = oracle::rel(r.last.P, p_want);
  o.require(e_err <= 0.02, "energy off by " + fmt(e_err));
  o.require(p_err <= 0.01, "P off by " + fmt(p_err));
  o.require(r.branch_gap <= 0.02, "branches not merged, gap " + fmt(r.branch_gap));

  const DiagramReport& d = kirchhoff_diagram();
  const auto lambdas = SweepConfig{}.grid.resolve(ls, SweepConfig{}.margin);
  const double cell = lambdas[1] / lambdas[0];
  o.require(d.lambda_b_empirical && d.lambda_b_upper, "no lambda_b bracket");
  if (d.lambda_b_empirical && d.lambda_b_upper) {
    o.require(*d.lambda_b_empirical <= ls && ls <= *d.lambda_b_upper, "bracket misses lambda*");
    o.require(*d.lambda_b_upper / *d.lambda_b_empirical <= cell * cell * (1 + 1e-12), "bracket wider than 2 cells");
  }
  if (o.ok) o.detail = "energy " + fmt(e_err) + ", P " + fmt(p_err) + ", gap " + fmt(r.branch_gap);
  return o;
}

Outcome nep_scaling() {
  Outcome o;
  const double gamma = 4.0, q = 3.0;
  const Grid g{1, 100, 1.0};
  std::vector<double> x, y;
  for (double mu : {0.5, 1.0, 2.0}) {
    x.push_back(std::log(mu));
    y.push_back(std::log(maximize_lambda(Model(NepModel{gamma, q, mu, g}), {}).lambda0_star));
  }
  const double xm = (x[0] + x[1] + x[2]) / 3, ym = (y[0] + y[1] + y[2]) / 3;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 3; ++i) {
    sxy += (x[i] - xm) * (y[i] - ym);
    sxx += (x[i] - xm) * (x[i] - xm);
  }
  const double slope = sxy / sxx, want = (gamma - 2) / (q - 2);
  o.require(std::abs(slope - want) <= 1e-2, "slope " + fmt(slope));
  const NepScaling s = nep_scaling_constants(Model(NepModel{gamma, q, 1.0, g}), {});
  const NepCrossings c = nep_crossings(s);
  o.require(c.mu0 < c.lambda_star_cross, "mu0 >= lambda_*");
  const double r1 = std::abs(s.lambda_star(c.mu0) - c.mu0) / c.mu0;
  const double r2 = std::abs(s.lambda0_star(c.lambda_star_cross) - c.lambda_star_cross) / c.lambda_star_cross;
  o.require(r1 <= 1e-10 && r2 <= 1e-10, "fixed-point residual " + fmt(std::max(r1, r2)));
  if (o.ok) o.detail = "slope " + fmt(slope) + ", mu0=" + fmt(c.mu0) + " < lambda_*=" + fmt(c.lambda_star_cross);
  return o;
}

Outcome certification() {
  Outcome o;
  int certified = 0;
  double worst_fd = 0.0;
  for (const ModelSpec& spec : {ModelSpec{KirchhoffModel{1.0, 3.0, Grid{1, 100, 1.0}}},
                                ModelSpec{NepModel{4.0, 3.0, 1.0, Grid{1, 100, 1.0}}}}) {
    const Model m(spec);
    const ExtremalReport ex = maximize_lambda(m, {});
    const ModelConstants k = refine_embedding_constant(m, verify_hypotheses(m, 50, 4).constants, {});
    for (double frac : {0.3, 0.7, 1.0, 1.2, 1.5, 1.9}) {
      const double lambda = std::min(frac * ex.lambda0_star, 0.99 * ex.lambda_star);
      for (Branch b : {Branch::kPlus, Branch::kMinus}) {
        BranchHints h;
        h.seeds = {ex.maximizer.values};
        h.lambda0_star = ex.lambda0_star;
        const SolveReport r = minimize_branch(m, lambda, b, {}, h);
        if (!r.converged) continue;
        try {
          verify_solution(m, r, k);
          ++certified;
        } catch (const Error& e) {
          o.require(false, std::string("verify_solution: ") + e.what());
        }
        // reduced gradient against central differences along random directions
        // at a nearby direction: the gradient vanishes at the solution itself
        const SphereObjective J = reduced_energy(m, lambda, b);
        std::mt19937_64 rng(derive_seed(5, certified));
        Eigen::VectorXd kick = random_field(m.grid(), rng);
        kick *= 0.02 / m.metric().norm(kick);
        const Eigen::VectorXd v = r.solution.values / m.metric().norm(r.solution.values) + kick;
        const auto base = J(v);
        for (int i = 0; i < 5 && base; ++i) {
          Eigen::VectorXd d = random_field(m.grid(), rng);
          d /= m.metric().norm(d);
          const double s = 1e-5;
          const auto a = J(v + s * d), c = J(v - s * d);
          if (!a || !c) continue;
          const double err = std::abs((a->value - c->value) / (2 * s) - base->grad.dot(d)) / m.metric().dual_norm(base->grad);
          worst_fd = std::max(worst_fd, err);
        }
      }
    }
  }
  o.require(certified >= 20, "only " + std::to_string(certified) + " certified solutions");
  o.require(worst_fd <= 1e-5, "reduced-gradient FD error " + fmt(worst_fd));
  if (o.ok) o.detail = std::to_string(certified) + " solutions certified, FD error " + fmt(worst_fd);
  return o;
}

Outcome hypotheses() {
  Outcome o;
  std::string d;
  for (const ModelSpec& spec : {ModelSpec{KirchhoffModel{1.0, 3.0, Grid{1, 100, 1.0}}},
                                ModelSpec{NepModel{4.0, 3.0, 1.0, Grid{2, 20, 1.0}}}}) {
    const Model m(spec);
    try {
      const HypothesisReport r = verify_hypotheses(m, 1000, 6);
      o.require(r.max_homogeneity_error <= 1e-10, "homogeneity " + fmt(r.max_homogeneity_error));
      o.require(r.max_gradient_error <= 1e-6, "gradient " + fmt(r.max_gradient_error));
      o.require(std::isfinite(r.constants.C_E3) && r.constants.C_E3 > 0.0, "E3 quotient unbounded");
      d += (d.empty() ? "" : "; ") + m.id() + " C_E3=" + fmt(r.constants.C_E3);
    } catch (const Error& e) {
      o.require(false, e.what());
    }
  }
  if (o.ok) o.detail = d;
  return o;
}

Outcome determinism() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / ("nehari_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  auto run = [&](const std::string& tag, const char* threads) {
    const std::string out = (dir / tag).string();
    const char* argv[] = {"nehari", "sweep", "--seed", "3", "--threads", threads, "-o", out.c_str()};
    std::ostringstream so, se;
    const int code = run_cli(8, argv, so, se);
    o.require(code == 0, "sweep exit code " + std::to_string(code) + ": " + se.str());
    std::ifstream f(out + "_sweep.csv", std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  const std::string a = run("a", "1"), b = run("b", "1"), c = run("c", "4");
  o.require(!a.empty(), "empty CSV");
  o.require(a == b, "repeated runs differ");
  o.require(a == c, "thread count changes the output");
  std::filesystem::remove_all(dir);
  if (o.ok) o.detail = std::to_string(a.size()) + " bytes identical across 3 runs";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"fiber classification agrees with the sign-change scan", fiber_oracle},
      {"closed-form Rayleigh spot values", closed_forms},
      {"ratio law for scalar inputs and extremal reports", ratio_law},
      {"kirchhoff lambda* by two routes and mesh refinement", kirchhoff_two_routes},
      {"kirchhoff diagram regimes and non-existence probe", kirchhoff_regimes},
      {"kirchhoff fold limit and lambda_b bracket", kirchhoff_fold},
      {"nep mu power law and crossings", nep_scaling},
      {"solution certification", certification},
      {"hypothesis suite on both models", hypotheses},
      {"deterministic sweep output", determinism},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s [%zu] %s: %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    failed += o.ok ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
