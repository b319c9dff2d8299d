#include "couplekit/bench/analytic.hpp"

#include <cmath>

#include "couplekit/core/errors.hpp"

namespace couplekit::bench {

namespace {

std::shared_ptr<const core::DesignSpace> box_space(const Eigen::VectorXd& lower,
                                                   const Eigen::VectorXd& upper,
                                                   const Eigen::VectorXd& nominal,
                                                   const std::string& prefix) {
  std::vector<core::DesignVariable> vars;
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    vars.push_back(core::DesignVariable{prefix + std::to_string(i + 1), lower[i], upper[i],
                                        nominal[i], core::VariableRole::plant});
  }
  return std::make_shared<core::DesignSpace>(std::move(vars));
}

AnalyticProblem make_quadratic(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                               const Eigen::MatrixXd& c, const Eigen::VectorXd& lower,
                               const Eigen::VectorXd& upper, const Eigen::VectorXd& nominal,
                               const std::string& name) {
  const Eigen::Index n = a.size();
  if (b.size() != n || c.rows() != n || c.cols() != n || lower.size() != n ||
      upper.size() != n || nominal.size() != n) {
    throw ArgumentError("quadratic problem: inconsistent dimensions");
  }
  if (!c.isApprox(c.transpose(), 1e-12)) {
    throw ArgumentError("quadratic problem: coupling matrix must be symmetric");
  }
  Eigen::MatrixXd hessian = c;
  hessian.diagonal() = 2.0 * a;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hessian);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw ArgumentError("quadratic problem: Hessian 2 diag(a) + C must be positive definite");
  }

  AnalyticProblem p;
  p.name = name;
  p.space = box_space(lower, upper, nominal, "x");
  p.is_quadratic = true;
  p.curvature = a;
  p.linear = b;
  p.coupling = c;
  p.coupling.diagonal().setZero();

  const Eigen::VectorXd av = a, bv = b;
  const Eigen::MatrixXd cv = p.coupling;
  p.objective = [av, bv, cv](const Eigen::VectorXd& x) {
    double value = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) value += av[i] * x[i] * x[i] + bv[i] * x[i];
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      for (Eigen::Index j = i + 1; j < x.size(); ++j) value += cv(i, j) * x[i] * x[j];
    }
    return value;
  };
  p.objective_gradient = [av, bv, cv](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      double gi = 2.0 * av[i] * x[i] + bv[i];
      for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (j != i) gi += cv(i, j) * x[j];
      }
      g[i] = gi;
    }
    return g;
  };
  return p;
}

}  // namespace

opt::ProblemDefinition AnalyticProblem::to_problem() const {
  opt::ProblemDefinition problem;
  problem.space = space;
  problem.objective = "objective";
  problem.surfaces.emplace(
      "objective", std::make_shared<opt::AnalyticSurface>(space, objective, objective_gradient));
  for (const auto& c : constraints) {
    problem.surfaces.emplace(c.channel,
                             std::make_shared<opt::AnalyticSurface>(space, c.value, c.gradient));
    problem.constraints.push_back(opt::Constraint{c.channel, c.limit, c.direction});
  }
  problem.validate();
  return problem;
}

AnalyticProblem AnalyticProblem::permuted(const std::vector<Eigen::Index>& order) const {
  const Eigen::Index n = space->size();
  if (static_cast<Eigen::Index>(order.size()) != n) {
    throw ArgumentError("permutation size mismatch");
  }
  AnalyticProblem p = *this;
  p.space = std::make_shared<core::DesignSpace>(space->permuted(order));

  // order[k] = canonical index of the new k-th variable. The wrapped
  // callables scatter back into canonical order before evaluating so the
  // arithmetic (and hence every bit of the result) is unchanged.
  const std::vector<Eigen::Index> map = order;
  const auto unpermute = [map, n](const Eigen::VectorXd& x) {
    Eigen::VectorXd canonical(n);
    for (Eigen::Index k = 0; k < n; ++k) canonical[map[static_cast<std::size_t>(k)]] = x[k];
    return canonical;
  };
  const auto permute_vec = [map, n](const Eigen::VectorXd& g) {
    Eigen::VectorXd out(n);
    for (Eigen::Index k = 0; k < n; ++k) out[k] = g[map[static_cast<std::size_t>(k)]];
    return out;
  };

  const auto base_f = objective;
  const auto base_g = objective_gradient;
  p.objective = [base_f, unpermute](const Eigen::VectorXd& x) { return base_f(unpermute(x)); };
  p.objective_gradient = base_g
                             ? opt::AnalyticSurface::GradientFn(
                                   [base_g, unpermute, permute_vec](const Eigen::VectorXd& x) {
                                     return permute_vec(base_g(unpermute(x)));
                                   })
                             : nullptr;
  for (auto& c : p.constraints) {
    const auto cf = c.value;
    const auto cg = c.gradient;
    c.value = [cf, unpermute](const Eigen::VectorXd& x) { return cf(unpermute(x)); };
    c.gradient = cg ? opt::AnalyticSurface::GradientFn(
                          [cg, unpermute, permute_vec](const Eigen::VectorXd& x) {
                            return permute_vec(cg(unpermute(x)));
                          })
                    : nullptr;
  }

  if (known_optimum) p.known_optimum = permute_vec(*known_optimum);
  if (is_quadratic) {
    for (Eigen::Index k = 0; k < n; ++k) {
      p.curvature[k] = curvature[map[static_cast<std::size_t>(k)]];
      p.linear[k] = linear[map[static_cast<std::size_t>(k)]];
      for (Eigen::Index l = 0; l < n; ++l) {
        p.coupling(k, l) =
            coupling(map[static_cast<std::size_t>(k)], map[static_cast<std::size_t>(l)]);
      }
    }
  }
  return p;
}

double AnalyticProblem::optimal_response(Eigen::Index a, Eigen::Index b, double x_b) const {
  if (!is_quadratic) throw ArgumentError("optimal_response oracle needs a quadratic problem");
  const Eigen::Index n = space->size();
  double cross = linear[a];
  const Eigen::VectorXd nominal = space->nominal_point();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == a) continue;
    cross += coupling(a, j) * (j == b ? x_b : nominal[j]);
  }
  const double unclipped = -cross / (2.0 * curvature[a]);
  return std::clamp(unclipped, space->variable(a).lower, space->variable(a).upper);
}

double AnalyticProblem::response_slope(Eigen::Index a, Eigen::Index b, double x_b) const {
  if (!is_quadratic) throw ArgumentError("response_slope oracle needs a quadratic problem");
  double cross = linear[a];
  const Eigen::VectorXd nominal = space->nominal_point();
  for (Eigen::Index j = 0; j < space->size(); ++j) {
    if (j == a) continue;
    cross += coupling(a, j) * (j == b ? x_b : nominal[j]);
  }
  const double stationary = -cross / (2.0 * curvature[a]);
  // A clipped response is flat in x_b.
  if (stationary < space->variable(a).lower || stationary > space->variable(a).upper) return 0.0;
  return -coupling(a, b) / (2.0 * curvature[a]);
}

double AnalyticProblem::envelope_value(Eigen::Index a, Eigen::Index b, double x_b) const {
  Eigen::VectorXd x = space->nominal_point();
  x[b] = x_b;
  x[a] = optimal_response(a, b, x_b);
  return objective(x);
}

double AnalyticProblem::envelope_slope(Eigen::Index a, Eigen::Index b, double x_b) const {
  Eigen::VectorXd x = space->nominal_point();
  x[b] = x_b;
  x[a] = optimal_response(a, b, x_b);
  // Envelope theorem: the optimized variable's adjustment drops out where
  // the response is interior; where it is clipped the variable is constant,
  // so the partial derivative is the correct total derivative either way.
  return objective_gradient(x)[b];
}

AnalyticProblem quadratic_coupled(Eigen::Index n, const Eigen::MatrixXd& coupling,
                                  const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  const Eigen::VectorXd nominal = 0.5 * (lower + upper);
  AnalyticProblem p = make_quadratic(Eigen::VectorXd::Ones(n), Eigen::VectorXd::Zero(n), coupling,
                                     lower, upper, nominal, "quadratic_coupled");
  // The unconstrained minimum of x^T (I + C/2) x is the origin; record it
  // when the box contains it.
  if ((lower.array() <= 0.0).all() && (upper.array() >= 0.0).all()) {
    p.known_optimum = Eigen::VectorXd::Zero(n);
    p.known_value = 0.0;
  }
  return p;
}

AnalyticProblem quadratic_general(const Eigen::VectorXd& curvature, const Eigen::VectorXd& linear,
                                  const Eigen::MatrixXd& coupling, const Eigen::VectorXd& lower,
                                  const Eigen::VectorXd& upper, const Eigen::VectorXd& nominal,
                                  const std::string& name) {
  return make_quadratic(curvature, linear, coupling, lower, upper, nominal, name);
}

AnalyticProblem separable_quadratic(const Eigen::VectorXd& targets, const Eigen::VectorXd& lower,
                                    const Eigen::VectorXd& upper, const Eigen::VectorXd& nominal) {
  const Eigen::Index n = targets.size();
  AnalyticProblem p =
      make_quadratic(Eigen::VectorXd::Ones(n), -2.0 * targets, Eigen::MatrixXd::Zero(n, n), lower,
                     upper, nominal, "separable_quadratic");
  Eigen::VectorXd opt(n);
  for (Eigen::Index i = 0; i < n; ++i) opt[i] = std::clamp(targets[i], lower[i], upper[i]);
  p.known_optimum = opt;
  p.known_value = p.objective(opt);
  return p;
}

AnalyticProblem asymmetric_cubic() {
  AnalyticProblem p;
  p.name = "asymmetric_cubic";
  const Eigen::VectorXd lower = Eigen::VectorXd::Constant(2, -1.0);
  const Eigen::VectorXd upper = Eigen::VectorXd::Constant(2, 1.0);
  p.space = box_space(lower, upper, Eigen::VectorXd::Zero(2), "x");
  p.objective = [](const Eigen::VectorXd& x) {
    return x[0] * x[0] + x[1] * x[1] + x[0] * x[1] * x[1] * x[1];
  };
  p.objective_gradient = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(2);
    g[0] = 2.0 * x[0] + x[1] * x[1] * x[1];
    g[1] = 2.0 * x[1] + 3.0 * x[0] * x[1] * x[1];
    return g;
  };
  p.known_optimum = Eigen::VectorXd::Zero(2);
  p.known_value = 0.0;
  return p;
}

AnalyticProblem subset_benchmark() {
  Eigen::VectorXd a(5), b(5);
  a << 1.0, 1.0, 1.0, 1.5, 1.4;
  b << -2.0, 0.0, 0.0, 0.0, 0.0;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(5, 5);
  c(0, 1) = c(1, 0) = -1.8;
  c(0, 2) = c(2, 0) = -1.8;
  c(1, 2) = c(2, 1) = 1.8;
  const Eigen::VectorXd lower = Eigen::VectorXd::Constant(5, -1.0);
  const Eigen::VectorXd upper = Eigen::VectorXd::Constant(5, 1.0);
  return make_quadratic(a, b, c, lower, upper, Eigen::VectorXd::Zero(5), "subset_benchmark");
}

}  // namespace couplekit::bench
