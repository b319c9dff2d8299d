#include "couplekit/opt/solver.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "couplekit/core/errors.hpp"
#include "couplekit/core/minimize.hpp"
#include "couplekit/core/rng.hpp"

namespace couplekit::opt {

namespace {

constexpr int kMaxOuter = 40;
constexpr double kPenaltyInit = 10.0;
constexpr double kPenaltyGrowth = 10.0;
constexpr double kPenaltyMax = 1e10;

// Constraint residual in standardized channel units: g(u) <= 0 is feasible.
struct ScaledConstraint {
  const ResponseSurface* surface = nullptr;
  double limit_std = 0.0;
  double sign = 1.0;  // +1 for le, -1 for ge

  double residual(const Eigen::VectorXd& u) const {
    return sign * (surface->value(u) - limit_std);
  }
  Eigen::VectorXd residual_gradient(const Eigen::VectorXd& u) const {
    return sign * surface->gradient(u);
  }
};

struct Workspace {
  const ProblemDefinition* problem;
  const ResponseSurface* objective;
  std::vector<ScaledConstraint> constraints;
  std::vector<Eigen::Index> free_idx;
  Eigen::VectorXd anchor_u;  // full normalized point; frozen components fixed

  Eigen::VectorXd embed(const Eigen::VectorXd& v) const {
    Eigen::VectorXd u = anchor_u;
    for (std::size_t k = 0; k < free_idx.size(); ++k) u[free_idx[k]] = v[static_cast<Eigen::Index>(k)];
    return u;
  }

  Eigen::VectorXd extract(const Eigen::VectorXd& full) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(free_idx.size()));
    for (std::size_t k = 0; k < free_idx.size(); ++k) v[static_cast<Eigen::Index>(k)] = full[free_idx[k]];
    return v;
  }
};

Workspace make_workspace(const OptimizationSpec& spec) {
  Workspace ws;
  ws.problem = spec.problem;
  ws.objective = &spec.problem->surface(spec.problem->objective);
  for (const auto& c : spec.problem->constraints) {
    const ResponseSurface& s = spec.problem->surface(c.channel);
    ScaledConstraint sc;
    sc.surface = &s;
    sc.limit_std = s.standardization().to_standard(c.limit);
    sc.sign = c.direction == ConstraintDirection::le ? 1.0 : -1.0;
    ws.constraints.push_back(sc);
  }
  ws.free_idx = spec.free_variables;
  ws.anchor_u = spec.problem->design_space().normalize(spec.anchor_model);
  return ws;
}

OptimizationResult finish(const Workspace& ws, const Eigen::VectorXd& v, int iterations,
                          bool inner_converged, const SolverTolerances& tol) {
  const Eigen::VectorXd u = ws.embed(v);
  OptimizationResult result;
  result.u = u;
  result.x_model = ws.problem->design_space().denormalize(u);
  result.objective_std = ws.objective->value(u);
  result.objective_model = ws.objective->standardization().to_model(result.objective_std);
  result.iterations = iterations;

  result.max_violation = 0.0;
  for (const auto& c : ws.constraints) {
    const double violation = std::max(0.0, c.residual(u));
    result.violations.push_back(violation);
    result.max_violation = std::max(result.max_violation, violation);
  }
  result.feasible = result.max_violation <= tol.feasibility;
  if (!result.feasible) {
    result.status = SolveStatus::infeasible;
  } else {
    result.status = inner_converged ? SolveStatus::converged : SolveStatus::max_iter;
  }
  return result;
}

OptimizationResult solve_from(const Workspace& ws, const Eigen::VectorXd& v0,
                              const SolverTolerances& tol) {
  const auto k = static_cast<Eigen::Index>(ws.free_idx.size());
  const Eigen::VectorXd lo = Eigen::VectorXd::Zero(k);
  const Eigen::VectorXd hi = Eigen::VectorXd::Ones(k);

  core::BoxMinOptions inner_opts;
  inner_opts.max_iter = 200;
  inner_opts.grad_tol = tol.gradient;
  inner_opts.step_tol = tol.step;

  const std::size_t n_con = ws.constraints.size();
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_con));
  double rho = kPenaltyInit;

  Eigen::VectorXd v = v0;
  int total_iterations = 0;
  bool inner_converged = false;

  const int outer_rounds = n_con == 0 ? 1 : kMaxOuter;
  double prev_infeasibility = std::numeric_limits<double>::infinity();

  for (int outer = 0; outer < outer_rounds; ++outer) {
    auto lagrangian = [&](const Eigen::VectorXd& vv) {
      const Eigen::VectorXd u = ws.embed(vv);
      double value = ws.objective->value(u);
      for (std::size_t j = 0; j < n_con; ++j) {
        const double g = ws.constraints[j].residual(u);
        const double shifted = lambda[static_cast<Eigen::Index>(j)] + rho * g;
        if (shifted > 0.0) {
          value += (shifted * shifted - lambda[static_cast<Eigen::Index>(j)] *
                                            lambda[static_cast<Eigen::Index>(j)]) /
                   (2.0 * rho);
        } else {
          value -= lambda[static_cast<Eigen::Index>(j)] * lambda[static_cast<Eigen::Index>(j)] /
                   (2.0 * rho);
        }
      }
      return value;
    };
    auto lagrangian_gradient = [&](const Eigen::VectorXd& vv) {
      const Eigen::VectorXd u = ws.embed(vv);
      Eigen::VectorXd g_full = ws.objective->gradient(u);
      for (std::size_t j = 0; j < n_con; ++j) {
        const double g = ws.constraints[j].residual(u);
        const double multiplier = std::max(0.0, lambda[static_cast<Eigen::Index>(j)] + rho * g);
        if (multiplier > 0.0) g_full += multiplier * ws.constraints[j].residual_gradient(u);
      }
      return ws.extract(g_full);
    };

    const core::BoxMinResult inner = core::box_minimize(lagrangian, lagrangian_gradient, v, lo, hi, inner_opts);
    const double step = (inner.x - v).lpNorm<Eigen::Infinity>();
    v = inner.x;
    total_iterations += inner.iterations;
    inner_converged = inner.converged;

    if (n_con == 0) break;

    const Eigen::VectorXd u = ws.embed(v);
    double infeasibility = 0.0;
    for (std::size_t j = 0; j < n_con; ++j) {
      infeasibility = std::max(infeasibility, std::max(0.0, ws.constraints[j].residual(u)));
    }

    if (infeasibility <= tol.feasibility && outer > 0 && step <= 10.0 * tol.step) break;

    for (std::size_t j = 0; j < n_con; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      lambda[jj] = std::max(0.0, lambda[jj] + rho * ws.constraints[j].residual(u));
    }
    if (infeasibility > 0.25 * prev_infeasibility && rho < kPenaltyMax) {
      rho = std::min(rho * kPenaltyGrowth, kPenaltyMax);
    }
    prev_infeasibility = infeasibility;
  }

  return finish(ws, v, total_iterations, inner_converged, tol);
}

// Strict ordering of candidate results: feasibility first, then objective,
// then (for feasible ties) the lexicographically smaller normalized point.
bool better_than(const OptimizationResult& a, const OptimizationResult& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (!a.feasible) {
    if (a.max_violation != b.max_violation) return a.max_violation < b.max_violation;
    return a.objective_std < b.objective_std;
  }
  if (a.objective_std != b.objective_std) return a.objective_std < b.objective_std;
  for (Eigen::Index i = 0; i < a.u.size(); ++i) {
    if (a.u[i] != b.u[i]) return a.u[i] < b.u[i];
  }
  return false;
}

}  // namespace

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

OptimizationSpec OptimizationSpec::full(const ProblemDefinition& problem) {
  OptimizationSpec spec;
  spec.problem = &problem;
  const Eigen::Index n = problem.design_space().size();
  spec.free_variables.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) spec.free_variables.push_back(i);
  spec.anchor_model = problem.design_space().nominal_point();
  return spec;
}

OptimizationSpec OptimizationSpec::subset(const ProblemDefinition& problem,
                                          std::vector<Eigen::Index> free) {
  OptimizationSpec spec;
  spec.problem = &problem;
  spec.free_variables = std::move(free);
  spec.anchor_model = problem.design_space().nominal_point();
  return spec;
}

void OptimizationSpec::validate() const {
  if (!problem) throw ArgumentError("optimization spec has no problem");
  problem->validate();
  const Eigen::Index n = problem->design_space().size();
  if (free_variables.empty()) throw ArgumentError("optimization spec has an empty free set");
  std::set<Eigen::Index> seen;
  for (Eigen::Index i : free_variables) {
    if (i < 0 || i >= n) throw ArgumentError("free variable index out of range");
    if (!seen.insert(i).second) throw ArgumentError("free variable listed twice");
  }
  if (anchor_model.size() != n) {
    throw ArgumentError("anchor point dimension does not match the design space");
  }
  problem->design_space().normalize(anchor_model);  // bounds check, names the variable
}

OptimizationResult minimize(const OptimizationSpec& spec) {
  spec.validate();
  const Workspace ws = make_workspace(spec);
  return solve_from(ws, ws.extract(ws.anchor_u), spec.tolerances);
}

OptimizationResult minimize_multistart(const OptimizationSpec& spec, int n_starts,
                                       std::uint64_t seed) {
  spec.validate();
  if (n_starts < 1) throw ArgumentError("minimize_multistart requires n_starts >= 1");
  const Workspace ws = make_workspace(spec);

  // Start 0 is the anchor; the rest come from a prefix-stable seeded stream
  // so that increasing n_starts only ever adds candidates (the multistart
  // best is then non-increasing in n_starts by construction).
  std::vector<Eigen::VectorXd> starts;
  starts.push_back(ws.extract(ws.anchor_u));
  core::Rng rng(core::derive_seed(seed, 0x6d73u));
  for (int s = 1; s < n_starts; ++s) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(ws.free_idx.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform01();
    starts.push_back(std::move(v));
  }

  OptimizationResult best;
  bool have_best = false;
  for (const auto& start : starts) {
    const OptimizationResult candidate = solve_from(ws, start, spec.tolerances);
    if (!have_best || better_than(candidate, best)) {
      best = candidate;
      have_best = true;
    }
  }
  return best;
}

}  // namespace couplekit::opt
