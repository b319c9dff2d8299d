#include "couplekit/sgp/kernel.hpp"

#include "couplekit/core/errors.hpp"

namespace couplekit::sgp {

KernelParams KernelParams::from_values(double signal_variance, double length_scale,
                                       double noise_variance) {
  if (!(signal_variance > 0.0) || !(length_scale > 0.0) || noise_variance < 0.0) {
    throw ArgumentError("kernel parameters must satisfy sigma_f^2 > 0, l > 0, sigma^2 >= 0");
  }
  KernelParams k;
  k.log_signal_variance = std::log(signal_variance);
  k.log_length_scale = std::log(length_scale);
  // Noise floor keeps the log parameterization usable for noiseless data.
  k.log_noise_variance = std::log(std::max(noise_variance, 1e-300));
  return k;
}

Eigen::Vector3d KernelParams::as_log_vector() const {
  return {log_signal_variance, log_length_scale, log_noise_variance};
}

KernelParams KernelParams::from_log_vector(const Eigen::Vector3d& v) {
  KernelParams k;
  k.log_signal_variance = v[0];
  k.log_length_scale = v[1];
  k.log_noise_variance = v[2];
  return k;
}

double kernel_eval(const KernelParams& k, const Eigen::VectorXd& x1, const Eigen::VectorXd& x2) {
  if (x1.size() != x2.size()) {
    throw ArgumentError("kernel_eval: point dimensions differ");
  }
  if (!x1.allFinite() || !x2.allFinite()) {
    throw ArgumentError("kernel_eval: points must be finite");
  }
  const double sq = (x1 - x2).squaredNorm();
  const double l = k.length_scale();
  return k.signal_variance() * std::exp(-0.5 * sq / (l * l));
}

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) throw ArgumentError("squared_distances: dimension mismatch");
  Eigen::MatrixXd sq(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      sq(i, j) = (a.row(i) - b.row(j)).squaredNorm();
    }
  }
  return sq;
}

Eigen::MatrixXd kernel_from_sqdist(const KernelParams& k, const Eigen::MatrixXd& sqdist) {
  const double l = k.length_scale();
  return k.signal_variance() * (-0.5 / (l * l) * sqdist.array()).exp();
}

Eigen::MatrixXd kernel_matrix(const KernelParams& k, const Eigen::MatrixXd& a,
                              const Eigen::MatrixXd& b) {
  return kernel_from_sqdist(k, squared_distances(a, b));
}

}  // namespace couplekit::sgp
