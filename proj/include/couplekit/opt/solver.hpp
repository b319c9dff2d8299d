#pragma once

#include <cstdint>
#include <vector>

#include "couplekit/opt/problem.hpp"

namespace couplekit::opt {

enum class SolveStatus { converged, max_iter, infeasible };

std::string to_string(SolveStatus status);

struct SolverTolerances {
  double step = 1e-8;         // normalized-space step
  double feasibility = 1e-6;  // standardized constraint units
  double gradient = 1e-9;     // projected gradient of the inner subproblem
};

/// One bound-constrained sub-optimization: minimize the objective channel
/// over the free variables with every other variable frozen at the anchor.
/// The anchor also provides the start values of the free variables.
struct OptimizationSpec {
  const ProblemDefinition* problem = nullptr;
  std::vector<Eigen::Index> free_variables;
  Eigen::VectorXd anchor_model;  // full-dimension point, model units
  SolverTolerances tolerances;

  /// All variables free, anchored at the nominal point.
  static OptimizationSpec full(const ProblemDefinition& problem);
  /// Given variables free, everything else frozen at the nominal point.
  static OptimizationSpec subset(const ProblemDefinition& problem,
                                 std::vector<Eigen::Index> free);

  void validate() const;
};

struct OptimizationResult {
  Eigen::VectorXd x_model;               // full design point, bounds respected exactly
  Eigen::VectorXd u;                     // the same point, normalized
  double objective_model = 0.0;
  double objective_std = 0.0;
  bool feasible = false;
  double max_violation = 0.0;            // standardized units, 0 when feasible
  std::vector<double> violations;        // per constraint, standardized, >= 0
  int iterations = 0;
  SolveStatus status = SolveStatus::max_iter;
};

/// Augmented-Lagrangian outer loop with projected quasi-Newton inner solves
/// in normalized space. Deterministic for identical inputs; pure given
/// immutable surfaces, so any number of solves may run concurrently.
OptimizationResult minimize(const OptimizationSpec& spec);

/// Best feasible result across the anchor start plus (n_starts - 1) Latin
/// hypercube starts over the free subspace. Ties break toward the lower
/// objective, then the lexicographically smaller normalized point. With no
/// feasible start, returns the least-violating result with status
/// infeasible.
OptimizationResult minimize_multistart(const OptimizationSpec& spec, int n_starts,
                                       std::uint64_t seed);

}  // namespace couplekit::opt
