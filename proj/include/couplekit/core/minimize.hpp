#pragma once

#include <Eigen/Dense>
#include <functional>

namespace couplekit::core {

struct BoxMinOptions {
  int max_iter = 200;
  double grad_tol = 1e-9;   // infinity norm of the projected gradient
  double step_tol = 1e-10;  // infinity norm of the accepted step
  double fd_step = 1e-6;    // central-difference step when no gradient is given
  int max_backtracks = 40;
  double armijo_c1 = 1e-4;
};

struct BoxMinResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;
using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Projected BFGS with Armijo backtracking on a box. `grad` may be empty, in
/// which case central finite differences with `fd_step` are used. Fully
/// deterministic for identical inputs.
BoxMinResult box_minimize(const ScalarFn& f, const GradFn& grad, const Eigen::VectorXd& x0,
                          const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                          const BoxMinOptions& options = {});

}  // namespace couplekit::core
