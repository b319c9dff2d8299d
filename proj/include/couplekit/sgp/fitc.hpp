#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstdint>

#include "couplekit/sgp/kernel.hpp"

namespace couplekit::sgp {

struct FitConfig {
  int max_iter = 150;      // quasi-Newton iterations per start
  double grad_tol = 1e-6;  // on the log-parameter gradient
  double step_tol = 1e-10;
  int n_starts = 5;  // multistarts for hyperparameter optimization
};

struct TrainingSummary {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  std::uint64_t seed = 0;
  double log_marginal_likelihood = 0.0;
  int iterations = 0;     // quasi-Newton iterations of the winning start
  int evaluations = 0;    // likelihood evaluations across all starts
  double added_jitter = 0.0;
};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Sparse Gaussian process regression with the FITC approximation and a
/// squared-exponential kernel. Instances are immutable after construction;
/// predict and gradients are pure, so a model can be shared across threads.
///
/// Cached solve data: the Cholesky factor L of K_uu (+ jitter) and the
/// factor L_B of B = I + V D^-1 V^T with V = L^-1 K_ux and
/// D = diag(K_xx - Q) + sigma^2 I, plus the mean weight vector
/// w = L^-T B^-1 V D^-1 (y - prior_mean). Predictions never materialize the
/// N x N system:
///   mean(x*)     = prior_mean + k_*u w
///   variance(x*) = k** - ||a||^2 + ||L_B^-1 a||^2,  a = L^-1 k_u*
class FitcModel {
 public:
  /// Factorizes a model with fixed hyperparameters and inducing points.
  static FitcModel build(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         const Eigen::MatrixXd& z, const KernelParams& kernel);

  /// Full training: k-means++-style inducing point seeding (Z = X when
  /// m == n) and FITC marginal-likelihood maximization over the log
  /// hyperparameters from `n_starts` deterministic multistarts.
  static FitcModel fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Eigen::Index m,
                       std::uint64_t seed, const FitConfig& config = {});

  /// Default inducing count: min(n, max(50, ceil(n/5))).
  static Eigen::Index default_inducing_count(Eigen::Index n);

  Prediction predict(const Eigen::VectorXd& x_star) const;
  Eigen::VectorXd predict_mean_gradient(const Eigen::VectorXd& x_star) const;

  double log_marginal_likelihood() const { return summary_.log_marginal_likelihood; }

  const KernelParams& kernel() const { return kernel_; }
  const Eigen::MatrixXd& inducing_points() const { return z_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::MatrixXd& chol_kuu() const { return l_uu_; }
  const Eigen::MatrixXd& chol_b() const { return l_b_; }
  double prior_mean() const { return prior_mean_; }
  const TrainingSummary& summary() const { return summary_; }
  long negative_variance_clamps() const { return variance_clamps_.load(); }

  /// Reassembles a model from stored factors (artifact loading).
  static FitcModel from_parts(KernelParams kernel, Eigen::MatrixXd z, Eigen::VectorXd weights,
                              Eigen::MatrixXd l_uu, Eigen::MatrixXd l_b, double prior_mean,
                              TrainingSummary summary);

  /// An empty model; unusable until assigned from build/fit/from_parts.
  FitcModel() = default;
  FitcModel(const FitcModel& other);
  FitcModel& operator=(const FitcModel& other);

 private:
  void check_point(const Eigen::VectorXd& x_star) const;

  KernelParams kernel_;
  Eigen::MatrixXd z_;        // m x d inducing points (normalized input space)
  Eigen::VectorXd weights_;  // m
  Eigen::MatrixXd l_uu_;     // lower Cholesky of K_uu + jitter I
  Eigen::MatrixXd l_b_;      // lower Cholesky of B
  double prior_mean_ = 0.0;
  TrainingSummary summary_;
  mutable std::atomic<long> variance_clamps_{0};
};

}  // namespace couplekit::sgp
