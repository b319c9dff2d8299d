#pragma once

// Dense reference implementation of the FITC equations, materializing the
// full N x N approximate covariance. Test oracle only; O(N^3).

#include <Eigen/Dense>
#include <cmath>

namespace testsupport {

struct DenseFitc {
  Eigen::MatrixXd x;  // N x d training inputs
  Eigen::VectorXd y;  // N
  Eigen::MatrixXd z;  // M x d inducing points
  double sigma_f2 = 1.0;
  double length = 1.0;
  double noise = 1e-6;
  double prior_mean = 0.0;

  Eigen::MatrixXd kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const {
    Eigen::MatrixXd k(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < b.rows(); ++j) {
        const double sq = (a.row(i) - b.row(j)).squaredNorm();
        k(i, j) = sigma_f2 * std::exp(-0.5 * sq / (length * length));
      }
    }
    return k;
  }

  // K_FITC = Q + Lambda + sigma^2 I with Q = K_xu K_uu^-1 K_ux and
  // Lambda = diag(K_xx - Q).
  Eigen::MatrixXd k_fitc() const {
    Eigen::MatrixXd k_uu = kernel(z, z);
    k_uu.diagonal().array() += 1e-10;
    const Eigen::MatrixXd k_xu = kernel(x, z);
    const Eigen::MatrixXd q = k_xu * k_uu.ldlt().solve(k_xu.transpose());
    const Eigen::MatrixXd k_xx = kernel(x, x);
    Eigen::MatrixXd k = q;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      k(i, i) += std::max(k_xx(i, i) - q(i, i), 0.0) + noise;
    }
    return k;
  }

  Eigen::VectorXd lambda() const {
    Eigen::MatrixXd k_uu = kernel(z, z);
    k_uu.diagonal().array() += 1e-10;
    const Eigen::MatrixXd k_xu = kernel(x, z);
    const Eigen::MatrixXd q = k_xu * k_uu.ldlt().solve(k_xu.transpose());
    const Eigen::MatrixXd k_xx = kernel(x, x);
    return (k_xx.diagonal() - q.diagonal()).eval();
  }

  std::pair<double, double> predict(const Eigen::VectorXd& x_star) const {
    Eigen::MatrixXd k_uu = kernel(z, z);
    k_uu.diagonal().array() += 1e-10;
    const Eigen::LDLT<Eigen::MatrixXd> kuu_solver(k_uu);
    const Eigen::MatrixXd k_ux = kernel(z, x);

    Eigen::MatrixXd xs(1, x.cols());
    xs.row(0) = x_star.transpose();
    const Eigen::VectorXd k_su = kernel(xs, z).row(0);

    // q_*y = k_*u K_uu^-1 K_ux
    const Eigen::VectorXd q_sy = (k_su.transpose() * kuu_solver.solve(k_ux)).transpose();

    const Eigen::MatrixXd k = k_fitc();
    const Eigen::LDLT<Eigen::MatrixXd> solver(k);
    const Eigen::VectorXd r = (y.array() - prior_mean).matrix();
    const double mean = prior_mean + q_sy.dot(solver.solve(r));
    const double var = sigma_f2 - q_sy.dot(solver.solve(q_sy));
    return {mean, var};
  }

  double log_marginal_likelihood() const {
    const Eigen::MatrixXd k = k_fitc();
    const Eigen::LLT<Eigen::MatrixXd> llt(k);
    const Eigen::VectorXd r = (y.array() - prior_mean).matrix();
    const double quad = r.dot(llt.solve(r));
    const double log_det =
        2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
    return -0.5 * (quad + log_det + static_cast<double>(x.rows()) * std::log(2.0 * M_PI));
  }
};

}  // namespace testsupport
