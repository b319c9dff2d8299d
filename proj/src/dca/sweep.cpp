#include "couplekit/dca/sweep.hpp"

#include <cmath>

#include "couplekit/core/errors.hpp"
#include "couplekit/core/parallel.hpp"
#include "couplekit/core/rng.hpp"

namespace couplekit::dca {

namespace {

constexpr double kEndpointNudge = 1e-9;   // keeps frozen values strictly inside the box
constexpr double kBoundFlatTol = 1e-7;    // normalized distance counting as "at the bound"
constexpr int kMinIncluded = 3;

// First derivative of the quadratic through three points, evaluated at x.
double lagrange3_derivative(double x, double x1, double f1, double x2, double f2, double x3,
                            double f3) {
  return f1 * (2.0 * x - x2 - x3) / ((x1 - x2) * (x1 - x3)) +
         f2 * (2.0 * x - x1 - x3) / ((x2 - x1) * (x2 - x3)) +
         f3 * (2.0 * x - x1 - x2) / ((x3 - x1) * (x3 - x2));
}

bool all_at_same_bound(const std::vector<double>& values) {
  bool at_lower = true, at_upper = true;
  for (double v : values) {
    at_lower = at_lower && v <= kBoundFlatTol;
    at_upper = at_upper && v >= 1.0 - kBoundFlatTol;
  }
  return at_lower || at_upper;
}

}  // namespace

std::string to_string(AggregateNorm n) {
  switch (n) {
    case AggregateNorm::rms: return "rms";
    case AggregateNorm::l2: return "l2";
    case AggregateNorm::max: return "max";
  }
  return "rms";
}

AggregateNorm norm_from_string(const std::string& text) {
  if (text == "rms") return AggregateNorm::rms;
  if (text == "l2") return AggregateNorm::l2;
  if (text == "max") return AggregateNorm::max;
  throw ArgumentError("unknown aggregate norm '" + text + "' (expected rms, l2 or max)");
}

std::string to_string(DerivativeScheme s) {
  return s == DerivativeScheme::central ? "central" : "forward";
}

DerivativeScheme scheme_from_string(const std::string& text) {
  if (text == "central") return DerivativeScheme::central;
  if (text == "forward") return DerivativeScheme::forward;
  throw ArgumentError("unknown derivative scheme '" + text + "' (expected central or forward)");
}

std::string to_string(InfeasiblePolicy p) {
  return p == InfeasiblePolicy::exclude ? "exclude" : "fail";
}

InfeasiblePolicy policy_from_string(const std::string& text) {
  if (text == "exclude") return InfeasiblePolicy::exclude;
  if (text == "fail") return InfeasiblePolicy::fail;
  throw ArgumentError("unknown infeasible policy '" + text + "' (expected exclude or fail)");
}

void SweepConfig::validate() const {
  if (n_sweep < 3) throw ArgumentError("sweep requires at least 3 grid points (N_s >= 3)");
  if (n_starts < 1) throw ArgumentError("sweep requires at least one start per sub-optimization");
}

const SweepCell& CouplingReport::cell(Eigen::Index optimized, Eigen::Index perturbed) const {
  for (const auto& c : cells) {
    if (c.optimized == optimized && c.perturbed == perturbed) return c;
  }
  throw ArgumentError("no sweep cell for the requested variable pair");
}

double CouplingReport::max_unmasked_jx() const {
  double best = 0.0;
  for (Eigen::Index i = 0; i < j_x.rows(); ++i) {
    for (Eigen::Index j = 0; j < j_x.cols(); ++j) {
      if (!mask(i, j)) best = std::max(best, j_x(i, j));
    }
  }
  return best;
}

double aggregate_samples(const Eigen::VectorXd& samples, AggregateNorm norm) {
  if (samples.size() == 0) return 0.0;
  switch (norm) {
    case AggregateNorm::l2: return samples.norm();
    case AggregateNorm::max: return samples.lpNorm<Eigen::Infinity>();
    case AggregateNorm::rms:
      return samples.norm() / std::sqrt(static_cast<double>(samples.size()));
  }
  return 0.0;
}

SweepCell sweep_cell(const opt::ProblemDefinition& problem, Eigen::Index optimized,
                     Eigen::Index perturbed, const SweepConfig& config) {
  config.validate();
  problem.validate();
  const core::DesignSpace& space = problem.design_space();
  if (optimized == perturbed) {
    throw ArgumentError("sweep cell requires distinct optimized and perturbed variables");
  }
  if (optimized < 0 || optimized >= space.size() || perturbed < 0 || perturbed >= space.size()) {
    throw ArgumentError("sweep cell variable index out of range");
  }

  const int ns = config.n_sweep;
  SweepCell cell;
  cell.optimized = optimized;
  cell.perturbed = perturbed;
  cell.grid_u.resize(ns);
  cell.x_opt_u = Eigen::VectorXd::Constant(ns, std::nan(""));
  cell.psi_std = Eigen::VectorXd::Constant(ns, std::nan(""));
  cell.included.assign(static_cast<std::size_t>(ns), 0);

  const std::uint64_t cell_seed = core::derive_seed(
      core::derive_seed(config.seed, core::fnv1a64(space.variable(optimized).name)),
      core::fnv1a64(space.variable(perturbed).name));

  for (int i = 0; i < ns; ++i) {
    double u = static_cast<double>(i) / static_cast<double>(ns - 1);
    u = std::clamp(u, kEndpointNudge, 1.0 - kEndpointNudge);
    cell.grid_u[i] = u;

    opt::OptimizationSpec spec = opt::OptimizationSpec::subset(problem, {optimized});
    spec.anchor_model[perturbed] = space.denormalize_component(perturbed, u);
    const opt::OptimizationResult result = opt::minimize_multistart(
        spec, config.n_starts, core::derive_seed(cell_seed, static_cast<std::uint64_t>(i)));

    if (result.feasible) {
      cell.included[static_cast<std::size_t>(i)] = 1;
      cell.x_opt_u[i] = result.u[optimized];
      cell.psi_std[i] = result.objective_std;
    } else if (config.infeasible == InfeasiblePolicy::fail) {
      throw Error("sweep cell (" + space.variable(optimized).name + ", " +
                  space.variable(perturbed).name + "): sub-optimization infeasible at grid point " +
                  std::to_string(i) + " and the infeasible policy is 'fail'");
    } else {
      ++cell.excluded_count;
    }
  }

  std::vector<int> idx;
  for (int i = 0; i < ns; ++i) {
    if (cell.included[static_cast<std::size_t>(i)]) idx.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(idx.size());
  if (m < kMinIncluded) return cell;  // unavailable, diagnostics retained

  // Derivatives on the included grid in v = 2u - 1 coordinates.
  Eigen::VectorXd v(m), vx(m), psi(m), u_opt(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const int i = idx[static_cast<std::size_t>(k)];
    v[k] = 2.0 * cell.grid_u[i] - 1.0;
    u_opt[k] = cell.x_opt_u[i];
    vx[k] = 2.0 * cell.x_opt_u[i] - 1.0;
    psi[k] = cell.psi_std[i];
  }

  cell.dx_samples.resize(m);
  cell.dpsi_samples.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    std::vector<Eigen::Index> stencil;
    if (config.scheme == DerivativeScheme::forward) {
      stencil = k + 1 < m ? std::vector<Eigen::Index>{k, k + 1}
                          : std::vector<Eigen::Index>{k - 1, k};
    } else {
      if (k == 0) stencil = {0, 1, 2};
      else if (k == m - 1) stencil = {m - 3, m - 2, m - 1};
      else stencil = {k - 1, k, k + 1};
    }

    auto derive = [&](const Eigen::VectorXd& f) {
      if (stencil.size() == 2) {
        return (f[stencil[1]] - f[stencil[0]]) / (v[stencil[1]] - v[stencil[0]]);
      }
      return lagrange3_derivative(v[k], v[stencil[0]], f[stencil[0]], v[stencil[1]],
                                  f[stencil[1]], v[stencil[2]], f[stencil[2]]);
    };

    cell.dpsi_samples[k] = derive(psi);

    std::vector<double> stencil_opt;
    for (Eigen::Index s : stencil) stencil_opt.push_back(u_opt[s]);
    if (all_at_same_bound(stencil_opt)) {
      // Optimal response pinned at A's bound across the stencil: flat.
      cell.dx_samples[k] = 0.0;
      ++cell.bound_flat_count;
    } else {
      cell.dx_samples[k] = derive(vx);
    }
  }

  cell.available = true;
  return cell;
}

CouplingReport coupling_matrices(const opt::ProblemDefinition& problem,
                                 const SweepConfig& config) {
  config.validate();
  problem.validate();
  const core::DesignSpace& space = problem.design_space();
  const Eigen::Index n = space.size();
  if (n < 2) throw ArgumentError("coupling analysis requires at least two variables");

  CouplingReport report;
  report.variable_names = space.variable_names();
  report.config = config;
  report.j_x = Eigen::MatrixXd::Zero(n, n);
  report.j_psi = Eigen::MatrixXd::Zero(n, n);
  report.mask = Eigen::MatrixXi::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) report.mask(i, i) = 1;

  struct Pair {
    Eigen::Index a, b;
  };
  std::vector<Pair> pairs;
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      if (a != b) pairs.push_back({a, b});
    }
  }

  report.cells.resize(pairs.size());
  core::parallel_for(
      pairs.size(),
      [&](std::size_t k) {
        report.cells[k] = sweep_cell(problem, pairs[k].a, pairs[k].b, config);
      },
      config.workers);

  for (const auto& cell : report.cells) {
    if (!cell.available) {
      report.mask(cell.optimized, cell.perturbed) = 1;
      continue;
    }
    report.j_x(cell.optimized, cell.perturbed) =
        aggregate_samples(cell.dx_samples, config.norm);
    report.j_psi(cell.optimized, cell.perturbed) =
        aggregate_samples(cell.dpsi_samples, config.norm);
  }
  return report;
}

AsymmetryIndex asymmetry_index(const CouplingReport& report) {
  const Eigen::Index n = report.size();
  if (n == 0) throw ArgumentError("asymmetry index needs a non-empty report");
  AsymmetryIndex out;
  out.index = Eigen::MatrixXd::Zero(n, n);
  out.mask = Eigen::MatrixXi::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      if (a == b || report.mask(a, b) || report.mask(b, a)) {
        out.mask(a, b) = 1;
        continue;
      }
      const double ab = report.j_x(a, b);
      const double ba = report.j_x(b, a);
      out.index(a, b) = std::abs(ab - ba) / std::max({ab, ba, 1e-12});
    }
  }
  return out;
}

}  // namespace couplekit::dca
