#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "couplekit/opt/solver.hpp"

namespace couplekit::dca {

enum class AggregateNorm { rms, l2, max };
enum class DerivativeScheme { central, forward };
enum class InfeasiblePolicy { exclude, fail };

std::string to_string(AggregateNorm n);
AggregateNorm norm_from_string(const std::string& text);
std::string to_string(DerivativeScheme s);
DerivativeScheme scheme_from_string(const std::string& text);
std::string to_string(InfeasiblePolicy p);
InfeasiblePolicy policy_from_string(const std::string& text);

struct SweepConfig {
  int n_sweep = 11;  // grid points per perturbation sweep, >= 3
  AggregateNorm norm = AggregateNorm::rms;
  DerivativeScheme scheme = DerivativeScheme::central;
  InfeasiblePolicy infeasible = InfeasiblePolicy::exclude;
  std::uint64_t seed = 0;
  int n_starts = 3;  // multistarts per sub-optimization
  int workers = 0;   // 0 = COUPLEKIT_THREADS / hardware

  void validate() const;
};

/// One (optimized A, perturbed B) sweep: the per-grid-point re-optimization
/// record plus the finite-difference derivative samples feeding both
/// Jacobian entries. Derivatives are taken with respect to the perturbation
/// coordinate rescaled to [-1, 1] (half-span hat units), which keeps
/// entries invariant under affine re-unitting of any variable.
struct SweepCell {
  Eigen::Index optimized = -1;
  Eigen::Index perturbed = -1;
  Eigen::VectorXd grid_u;   // B's normalized grid, endpoints nudged inward
  Eigen::VectorXd x_opt_u;  // optimal A per grid point (NaN when excluded)
  Eigen::VectorXd psi_std;  // optimized objective, standardized (NaN when excluded)
  std::vector<char> included;
  Eigen::VectorXd dx_samples;    // d x_hat_A* / d x_hat_B at included points
  Eigen::VectorXd dpsi_samples;  // d Psi_hat / d x_hat_B at included points
  int excluded_count = 0;
  int bound_flat_count = 0;  // J_x samples forced to 0 at an active bound of A
  bool available = false;    // >= 3 included points

  Eigen::Index included_count() const {
    return static_cast<Eigen::Index>(included.size()) - excluded_count;
  }
};

struct CouplingReport {
  std::vector<std::string> variable_names;
  Eigen::MatrixXd j_x;    // design coupling matrix, row = optimized variable
  Eigen::MatrixXd j_psi;  // objective sensitivity matrix
  Eigen::MatrixXi mask;   // 1 = masked (diagonal or unavailable cell)
  std::vector<SweepCell> cells;
  SweepConfig config;

  Eigen::Index size() const { return j_x.rows(); }
  const SweepCell& cell(Eigen::Index optimized, Eigen::Index perturbed) const;
  double max_unmasked_jx() const;
};

/// Aggregate norm over derivative samples: rms = |v|_2 / sqrt(n),
/// l2 = |v|_2, max = |v|_inf.
double aggregate_samples(const Eigen::VectorXd& samples, AggregateNorm norm);

/// Sweep one (A, B) pair: for each of N_s uniform grid points of B, solve
/// the 1-D sub-optimization over A (everything else at nominal) and
/// finite-difference the optimal responses on the grid (3-point stencils:
/// central inside, one-sided second order at the ends).
SweepCell sweep_cell(const opt::ProblemDefinition& problem, Eigen::Index optimized,
                     Eigen::Index perturbed, const SweepConfig& config);

/// All N_x (N_x - 1) cells, schedulable in parallel with bit-identical
/// results for any worker count (per-cell seeds derive from variable names,
/// so reports are also equivariant under variable reordering).
CouplingReport coupling_matrices(const opt::ProblemDefinition& problem,
                                 const SweepConfig& config);

struct AsymmetryIndex {
  Eigen::MatrixXd index;  // |J_x(A,B) - J_x(B,A)| / max(J_x(A,B), J_x(B,A), eps)
  Eigen::MatrixXi mask;
};

AsymmetryIndex asymmetry_index(const CouplingReport& report);

}  // namespace couplekit::dca
