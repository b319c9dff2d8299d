#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "couplekit/opt/problem.hpp"

namespace couplekit::bench {

/// Closed-form benchmark problem with optimal-response oracles, so the
/// sweep machinery can be checked against ground truth end to end.
struct AnalyticProblem {
  std::string name;
  std::shared_ptr<const core::DesignSpace> space;
  opt::AnalyticSurface::ValueFn objective;
  opt::AnalyticSurface::GradientFn objective_gradient;
  struct AnalyticConstraint {
    std::string channel;
    opt::AnalyticSurface::ValueFn value;
    opt::AnalyticSurface::GradientFn gradient;
    double limit = 0.0;
    opt::ConstraintDirection direction = opt::ConstraintDirection::le;
  };
  std::vector<AnalyticConstraint> constraints;

  std::optional<Eigen::VectorXd> known_optimum;  // model units
  std::optional<double> known_value;

  // Quadratic-family coefficients when applicable:
  // f(x) = sum_i a_i x_i^2 + sum_{i<j} C_ij x_i x_j + sum_i b_i x_i
  bool is_quadratic = false;
  Eigen::VectorXd curvature;  // a
  Eigen::VectorXd linear;     // b
  Eigen::MatrixXd coupling;   // C, symmetric, zero diagonal

  /// Wraps the closed forms as response surfaces bound to this space.
  opt::ProblemDefinition to_problem() const;

  /// Copy with reordered variables; the wrapped callables evaluate in the
  /// original canonical order so values are bit-identical under relabeling.
  AnalyticProblem permuted(const std::vector<Eigen::Index>& order) const;

  // --- quadratic-family oracles -------------------------------------------
  /// Bound-clipped optimal response of variable A with B at x_b and the
  /// rest at nominal (model units).
  double optimal_response(Eigen::Index a, Eigen::Index b, double x_b) const;
  /// d x_A* / d x_B at that point (0 where the response is clipped).
  double response_slope(Eigen::Index a, Eigen::Index b, double x_b) const;
  /// Objective value along the optimal-response curve.
  double envelope_value(Eigen::Index a, Eigen::Index b, double x_b) const;
  /// d Psi / d x_B along the optimal-response curve (envelope theorem).
  double envelope_slope(Eigen::Index a, Eigen::Index b, double x_b) const;

  double evaluate(const Eigen::VectorXd& x) const { return objective(x); }
};

/// f(x) = sum x_i^2 + sum_{i<j} C_ij x_i x_j on a box, nominal at the box
/// midpoint. Requires the Hessian 2I + C to be positive definite.
AnalyticProblem quadratic_coupled(Eigen::Index n, const Eigen::MatrixXd& coupling,
                                  const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

/// General quadratic: f(x) = sum a_i x_i^2 + sum_{i<j} C_ij x_i x_j + b.x
AnalyticProblem quadratic_general(const Eigen::VectorXd& curvature, const Eigen::VectorXd& linear,
                                  const Eigen::MatrixXd& coupling, const Eigen::VectorXd& lower,
                                  const Eigen::VectorXd& upper, const Eigen::VectorXd& nominal,
                                  const std::string& name = "quadratic");

/// n independent parabolas f = sum (x_i - t_i)^2; no coupling anywhere.
AnalyticProblem separable_quadratic(const Eigen::VectorXd& targets, const Eigen::VectorXd& lower,
                                    const Eigen::VectorXd& upper, const Eigen::VectorXd& nominal);

/// f = x1^2 + x2^2 + x1 x2^3 on [-1,1]^2: strongly one-directional coupling,
/// the standard witness that the coupling matrix is not symmetric.
AnalyticProblem asymmetric_cubic();

/// Five-variable quadratic whose best k=3 subset is only found when the
/// selection exploits couplings: variable 0 carries a strong direct term,
/// 1 and 2 pay off only through their interaction with 0, and 3, 4 have
/// steep but already-optimal-at-nominal direct terms.
AnalyticProblem subset_benchmark();

}  // namespace couplekit::bench
