#include "couplekit/core/minimize.hpp"

#include <cmath>

#include "couplekit/core/errors.hpp"

namespace couplekit::core {

namespace {

Eigen::VectorXd clamp_to_box(Eigen::VectorXd x, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi) {
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
  return x;
}

Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                   const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  Eigen::VectorXd pg = g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const bool at_lower = x[i] <= lo[i] && g[i] > 0.0;
    const bool at_upper = x[i] >= hi[i] && g[i] < 0.0;
    if (at_lower || at_upper) pg[i] = 0.0;
  }
  return pg;
}

}  // namespace

BoxMinResult box_minimize(const ScalarFn& f, const GradFn& grad, const Eigen::VectorXd& x0,
                          const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                          const BoxMinOptions& options) {
  const Eigen::Index n = x0.size();
  if (lower.size() != n || upper.size() != n) {
    throw ArgumentError("box_minimize: bound dimensions differ from the start point");
  }

  BoxMinResult result;
  int evals = 0;

  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return f(x);
  };

  auto gradient_at = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    if (grad) return grad(x);
    Eigen::VectorXd g(n);
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double h = options.fd_step * std::max(1.0, std::abs(x[i]));
      const double saved = xp[i];
      xp[i] = saved + h;
      const double fp = eval(xp);
      xp[i] = saved - h;
      const double fm = eval(xp);
      xp[i] = saved;
      g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
  };

  Eigen::VectorXd x = clamp_to_box(x0, lower, upper);
  double fx = eval(x);
  Eigen::VectorXd g = gradient_at(x);
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);

  for (int iter = 0; iter < options.max_iter; ++iter) {
    result.iterations = iter + 1;
    const Eigen::VectorXd pg = projected_gradient(x, g, lower, upper);
    if (pg.lpNorm<Eigen::Infinity>() <= options.grad_tol) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd direction = -(h_inv * g);
    if (direction.dot(g) >= 0.0) {
      h_inv.setIdentity();
      direction = -g;
    }

    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd x_new;
    double f_new = fx;
    for (int bt = 0; bt < options.max_backtracks; ++bt) {
      x_new = clamp_to_box(x + alpha * direction, lower, upper);
      const Eigen::VectorXd step = x_new - x;
      if (step.lpNorm<Eigen::Infinity>() == 0.0) break;
      f_new = eval(x_new);
      if (std::isfinite(f_new) && f_new <= fx + options.armijo_c1 * g.dot(step)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // Steepest descent retry before giving up; covers a stale Hessian.
      if (!h_inv.isIdentity(0.0)) {
        h_inv.setIdentity();
        continue;
      }
      result.converged = pg.lpNorm<Eigen::Infinity>() <= 1e3 * options.grad_tol;
      break;
    }

    const Eigen::VectorXd step = x_new - x;
    const bool clipped = ((x + alpha * direction) - x_new).lpNorm<Eigen::Infinity>() > 0.0;
    const Eigen::VectorXd g_new = gradient_at(x_new);
    const Eigen::VectorXd dg = g_new - g;
    const double sy = step.dot(dg);
    if (sy > 1e-12 * step.norm() * dg.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd outer = step * dg.transpose();
      h_inv = (Eigen::MatrixXd::Identity(n, n) - rho * outer) * h_inv *
                  (Eigen::MatrixXd::Identity(n, n) - rho * outer.transpose()) +
              rho * step * step.transpose();
    } else if (clipped) {
      h_inv.setIdentity();
    }

    x = x_new;
    fx = f_new;
    g = g_new;

    if (step.lpNorm<Eigen::Infinity>() <= options.step_tol) {
      result.converged = true;
      break;
    }
  }

  result.x = x;
  result.value = fx;
  result.gradient = g;
  result.evaluations = evals;
  return result;
}

}  // namespace couplekit::core
