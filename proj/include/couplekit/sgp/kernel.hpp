#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace couplekit::sgp {

/// Squared-exponential kernel hyperparameters, stored in log space so that
/// positivity is structural during optimization.
struct KernelParams {
  double log_signal_variance = 0.0;
  double log_length_scale = 0.0;
  double log_noise_variance = -6.0;

  double signal_variance() const { return std::exp(log_signal_variance); }
  double length_scale() const { return std::exp(log_length_scale); }
  double noise_variance() const { return std::exp(log_noise_variance); }

  static KernelParams from_values(double signal_variance, double length_scale,
                                  double noise_variance);

  Eigen::Vector3d as_log_vector() const;
  static KernelParams from_log_vector(const Eigen::Vector3d& v);
};

/// k(x1, x2) = sigma_f^2 * exp(-||x1 - x2||^2 / (2 l^2))
double kernel_eval(const KernelParams& k, const Eigen::VectorXd& x1, const Eigen::VectorXd& x2);

/// Pairwise squared Euclidean distances between the rows of A and B.
Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Kernel matrix from precomputed squared distances.
Eigen::MatrixXd kernel_from_sqdist(const KernelParams& k, const Eigen::MatrixXd& sqdist);

Eigen::MatrixXd kernel_matrix(const KernelParams& k, const Eigen::MatrixXd& a,
                              const Eigen::MatrixXd& b);

}  // namespace couplekit::sgp
