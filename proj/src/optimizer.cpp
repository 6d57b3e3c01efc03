#include "nehari/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>
#include <vector>

#include "nehari/error.hpp"

namespace nehari {

void OptimizerOptions::validate() const {
  if (max_iter < 1 || restarts < 1 || threads < 1) {
    throw ValidationError("optimizer counts (max_iter, restarts, threads) must be positive");
  }
  if (!(grad_tol > 0.0) || !(initial_step > 0.0) || !(sufficient_increase > 0.0)) {
    throw ValidationError("optimizer tolerances and step parameters must be positive");
  }
  if (!(shrink > 0.0 && shrink < 1.0)) throw ValidationError("optimizer shrink factor must lie in (0,1)");
}

namespace {

struct Tangent {
  Eigen::VectorXd dir;  // K-orthogonal projection of K^{-1} g onto the tangent space at u
  double norm = 0.0;    // its H^1 norm
};

Tangent tangent_gradient(const H1Metric& metric, const Eigen::VectorXd& u, const Eigen::VectorXd& g) {
  Tangent t;
  t.dir = metric.riesz(g);
  t.dir -= g.dot(u) * u;
  t.norm = std::sqrt(std::max(0.0, g.dot(t.dir)));
  return t;
}

}  // namespace

AscentResult maximize_on_sphere(const H1Metric& metric, const SphereObjective& f, Eigen::VectorXd start,
                                const OptimizerOptions& opts) {
  opts.validate();
  AscentResult res;
  const double n0 = metric.norm(start);
  if (!(n0 > 0.0)) throw ValidationError("optimizer start point must be nonzero");
  Eigen::VectorXd u = start / n0;

  auto cur = f(u);
  res.u = u;
  if (!cur) return res;
  res.feasible = true;
  Tangent tg = tangent_gradient(metric, u, cur->grad);

  double alpha = opts.initial_step;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (tg.norm <= opts.grad_tol * cur->grad_scale) {
      res.converged = true;
      break;
    }
    alpha = std::min(alpha, 1.0 / tg.norm);
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                         std::max(std::abs(cur->value), cur->value_scale);
    bool accepted = false;
    Eigen::VectorXd un;
    std::optional<ObjectiveValue> next;
    Tangent tn;
    for (int ls = 0; ls < 80; ++ls) {
      un = u + alpha * tg.dir;
      un /= metric.norm(un);
      next = f(un);
      if (next) {
        if (next->value >= cur->value + opts.sufficient_increase * alpha * tg.norm * tg.norm) {
          tn = tangent_gradient(metric, un, next->grad);
          accepted = true;
          break;
        }
        // Near the optimum the predicted increase drops below round-off; accept
        // steps that stay within the noise floor and shrink the gradient.
        if (next->value >= cur->value - noise) {
          tn = tangent_gradient(metric, un, next->grad);
          if (tn.norm < tg.norm) {
            accepted = true;
            break;
          }
        }
      }
      alpha *= opts.shrink;
    }
    if (!accepted) break;

    // Barzilai-Borwein step for the next iteration.
    const Eigen::VectorXd s = un - u;
    const Eigen::VectorXd y = tn.dir - tg.dir;
    const double ss = metric.inner(s, s);
    const double sy = metric.inner(s, y);
    const double grow = alpha / opts.shrink;
    alpha = sy < 0.0 ? std::min(ss / -sy, 1e3 * grow) : grow;
    if (!(alpha > 0.0) || !std::isfinite(alpha)) alpha = opts.initial_step;

    u = std::move(un);
    cur = std::move(next);
    tg = std::move(tn);
  }
  res.u = u;
  res.value = cur->value;
  res.relative_gradient = tg.norm / cur->grad_scale;
  res.iterations = it;
  return res;
}

AscentResult minimize_on_sphere(const H1Metric& metric, const SphereObjective& f, Eigen::VectorXd start,
                                const OptimizerOptions& opts) {
  SphereObjective neg = [&f](const Eigen::VectorXd& u) -> std::optional<ObjectiveValue> {
    auto v = f(u);
    if (v) {
      v->value = -v->value;
      v->grad = -v->grad;
    }
    return v;
  };
  AscentResult r = maximize_on_sphere(metric, neg, std::move(start), opts);
  r.value = -r.value;
  return r;
}

void for_each_index(int count, int threads, const std::function<void(int)>& fn) {
  std::vector<std::exception_ptr> errors(static_cast<size_t>(std::max(count, 0)));
  const int workers = std::clamp(threads, 1, std::max(count, 1));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace nehari
