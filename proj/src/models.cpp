#include "nehari/models.hpp"

#include <cmath>
#include <sstream>

#include "nehari/error.hpp"

namespace nehari {

namespace {

struct PowerIntegral {
  double value;
  Eigen::VectorXd grad;
};

// w * sum |u|^r and its gradient r w |u|^{r-2} u.
PowerIntegral power_integral(const Eigen::VectorXd& u, double r, double w) {
  PowerIntegral out{0.0, Eigen::VectorXd(u.size())};
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    if (a == 0.0) {
      out.grad[i] = 0.0;
      continue;
    }
    const double am1 = std::pow(a, r - 1.0);
    out.value += am1 * a;
    out.grad[i] = r * w * std::copysign(am1, u[i]);
  }
  out.value *= w;
  return out;
}

double rel_err(double got, double want) {
  const double den = std::max(std::abs(want), std::numeric_limits<double>::min());
  return std::abs(got - want) / den;
}

}  // namespace

Exponents exponents(const ModelSpec& spec) {
  return std::visit(
      [](const auto& m) -> Exponents {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, KirchhoffModel>) {
          return {2.0, m.q, 4.0};
        } else {
          return {2.0, m.q, m.gamma};
        }
      },
      spec);
}

const Grid& model_grid(const ModelSpec& spec) {
  return std::visit([](const auto& m) -> const Grid& { return m.grid; }, spec);
}

std::string model_id(const ModelSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, KirchhoffModel>) {
          os << "kirchhoff(a=" << m.a << ";q=" << m.q;
        } else {
          os << "nep(gamma=" << m.gamma << ";q=" << m.q << ";mu=" << m.mu;
        }
        os << ";dim=" << m.grid.dim << ";n=" << m.grid.n << ";L=" << m.grid.length << ")";
      },
      spec);
  return os.str();
}

std::optional<double> structural_c3(const ModelSpec& spec) {
  if (const auto* k = std::get_if<KirchhoffModel>(&spec)) return 1.0 / (k->a * k->a);
  return std::nullopt;
}

void validate(const ModelSpec& spec) {
  std::visit(
      [](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        m.grid.validate();
        if constexpr (std::is_same_v<M, KirchhoffModel>) {
          if (!(m.a > 0.0)) throw ValidationError("kirchhoff requires a > 0");
          if (!(m.q > 2.0)) throw ValidationError("requires p < q (kirchhoff: q > 2)");
          if (!(m.q < 4.0)) throw ValidationError("requires q < gamma (kirchhoff: q < 4)");
        } else {
          if (!(m.mu > 0.0)) throw ValidationError("nep requires mu > 0");
          if (!(m.q > 2.0)) throw ValidationError("requires p < q (nep: q > 2)");
          if (!(m.q < m.gamma)) throw ValidationError("requires q < gamma");
          if (!std::isfinite(m.gamma)) throw ValidationError("nep requires finite gamma");
        }
      },
      spec);
}

Model::Model(ModelSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  exps_ = exponents(spec_);
  exps_.validate();
  metric_ = std::make_shared<const H1Metric>(model_grid(spec_));
}

ModelEval Model::eval(const Eigen::VectorXd& u) const {
  const Grid& g = grid();
  if (u.size() != g.unknowns()) throw ValidationError("field size does not match the model grid");
  const double D = dirichlet_energy(g, u);
  const Eigen::VectorXd gradD = 2.0 * metric_->apply(u);
  const double w = g.weight();
  ModelEval ev;
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, KirchhoffModel>) {
          ev.P = m.a * D;
          ev.gradP = m.a * gradD;
          ev.T = D * D;
          ev.gradT = 2.0 * D * gradD;
          auto q = power_integral(u, m.q, w);
          ev.Q = q.value;
          ev.gradQ = std::move(q.grad);
        } else {
          ev.P = D;
          ev.gradP = gradD;
          auto t = power_integral(u, m.gamma, w);
          ev.T = t.value;
          ev.gradT = std::move(t.grad);
          auto q = power_integral(u, m.q, w);
          ev.Q = m.mu * q.value;
          ev.gradQ = m.mu * q.grad;
        }
      },
      spec_);
  if (!std::isfinite(ev.P) || !std::isfinite(ev.T) || !std::isfinite(ev.Q) || !ev.gradP.allFinite() ||
      !ev.gradT.allFinite() || !ev.gradQ.allFinite()) {
    throw EvaluationError("model evaluation produced non-finite values");
  }
  return ev;
}

double Model::energy(const ModelEval& ev, double lambda) const {
  return ev.P / exps_.p + lambda * ev.T / exps_.gamma - ev.Q / exps_.q;
}

Eigen::VectorXd Model::energy_gradient(const ModelEval& ev, double lambda) const {
  return ev.gradP / exps_.p + (lambda / exps_.gamma) * ev.gradT - ev.gradQ / exps_.q;
}

ModelEval eval_triple(const Model& model, const GridFunction& u) {
  if (!(u.grid == model.grid())) throw ValidationError("grid function lives on a different grid");
  return model.eval(u.values);
}

double ModelConstants::nehari_norm_bound(const Exponents& e) const {
  return std::pow(C1 / C2, 1.0 / (e.q - e.p));
}

HypothesisReport verify_hypotheses(const Model& model, int samples, std::uint64_t seed,
                                   const HypothesisOptions& opts) {
  if (samples < 1) throw ValidationError("verify_hypotheses needs at least one sample");
  const Exponents& e = model.exps();
  try {
    e.validate();
  } catch (const InvalidExponentsError& ex) {
    throw HypothesisViolation("H", ex.what());
  }
  const auto c3 = structural_c3(model.spec());
  const H1Metric& metric = model.metric();

  HypothesisReport rep;
  rep.samples = samples;
  rep.constants.C1 = std::numeric_limits<double>::infinity();
  rep.min_e3_quotient = std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd u = random_field(model.grid(), rng);
    const double norm = metric.norm(u);
    if (!(norm > 0.0)) continue;
    const ModelEval ev = model.eval(u);

    if (!(ev.P > 0.0 && ev.T > 0.0 && ev.Q > 0.0)) {
      throw HypothesisViolation("E1", "non-positive functional value at a nonzero sample");
    }

    for (double t : {0.5, 2.0}) {
      const ModelEval et = model.eval(t * u);
      const double err = std::max({rel_err(et.P, std::pow(t, e.p) * ev.P),
                                   rel_err(et.T, std::pow(t, e.gamma) * ev.T),
                                   rel_err(et.Q, std::pow(t, e.q) * ev.Q)});
      rep.max_homogeneity_error = std::max(rep.max_homogeneity_error, err);
    }
    if (rep.max_homogeneity_error > opts.homogeneity_tol) {
      throw HypothesisViolation("H", "homogeneity error " + std::to_string(rep.max_homogeneity_error));
    }

    const double euler = std::max({rel_err(ev.gradP.dot(u), e.p * ev.P),
                                   rel_err(ev.gradT.dot(u), e.gamma * ev.T),
                                   rel_err(ev.gradQ.dot(u), e.q * ev.Q)});
    rep.max_euler_error = std::max(rep.max_euler_error, euler);
    if (euler > opts.euler_tol) {
      throw HypothesisViolation("H", "Euler identity error " + std::to_string(euler));
    }

    // Directional derivatives against central differences.
    const double step = 1e-5 * norm;
    for (int k = 0; k < opts.gradient_directions; ++k) {
      Eigen::VectorXd d = random_field(model.grid(), rng);
      d /= metric.norm(d);
      const ModelEval fp = model.eval(u + step * d);
      const ModelEval fm = model.eval(u - step * d);
      auto check = [&](double vp, double vm, const Eigen::VectorXd& g) {
        const double fd = (vp - vm) / (2.0 * step);
        const double exact = g.dot(d);
        const double scale = std::max(std::abs(exact), g.cwiseAbs().dot(d.cwiseAbs()));
        return std::abs(fd - exact) / scale;
      };
      const double err = std::max({check(fp.P, fm.P, ev.gradP), check(fp.T, fm.T, ev.gradT),
                                   check(fp.Q, fm.Q, ev.gradQ)});
      rep.max_gradient_error = std::max(rep.max_gradient_error, err);
    }
    if (rep.max_gradient_error > opts.gradient_tol) {
      throw HypothesisViolation("H", "gradient mismatch " + std::to_string(rep.max_gradient_error));
    }

    const double e3 = rayleigh_lambda(ev.P, ev.T, ev.Q, e) / lambda_prefactor(e);
    if (!std::isfinite(e3)) throw HypothesisViolation("E3", "quotient is not finite");
    rep.constants.C_E3 = std::max(rep.constants.C_E3, e3);
    rep.min_e3_quotient = std::min(rep.min_e3_quotient, e3);

    rep.constants.C1 = std::min(rep.constants.C1, ev.P / std::pow(norm, e.p));
    rep.constants.C2 = std::max(rep.constants.C2, ev.Q / std::pow(norm, e.q));

    if (c3) {
      const double err = std::abs(ev.T - *c3 * ev.P * ev.P) / (ev.P * ev.P * *c3);
      rep.max_kirchhoff_structure_error = std::max(rep.max_kirchhoff_structure_error, err);
    }
  }
  if (!(rep.constants.C1 > 0.0) || !std::isfinite(rep.constants.C1)) {
    throw HypothesisViolation("E2", "coercivity constant C1 is not positive");
  }
  if (!(rep.constants.C2 > 0.0) || !std::isfinite(rep.constants.C2)) {
    throw HypothesisViolation("E2", "embedding constant C2 is not finite");
  }
  return rep;
}

}  // namespace nehari
