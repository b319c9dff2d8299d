#include "couplekit/sgp/fitc.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "couplekit/core/errors.hpp"
#include "couplekit/core/minimize.hpp"
#include "couplekit/core/rng.hpp"

namespace couplekit::sgp {

namespace {

constexpr double kJitterStart = 1e-10;
constexpr double kJitterMax = 1e-4;
constexpr double kNoiseFloor = 1e-10;
constexpr double kLogTwoPi = 1.8378770664093453;

struct Factors {
  Eigen::MatrixXd l_uu;
  Eigen::MatrixXd l_b;
  Eigen::VectorXd weights;
  double log_marginal_likelihood = 0.0;
  double added_jitter = 0.0;
};

// Cholesky of K_uu with escalating jitter (x10 per retry up to 1e-4).
std::pair<Eigen::MatrixXd, double> chol_with_jitter(const Eigen::MatrixXd& kuu) {
  for (double jitter = kJitterStart; jitter <= kJitterMax * (1.0 + 1e-12); jitter *= 10.0) {
    Eigen::MatrixXd shifted = kuu;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      return {Eigen::MatrixXd(llt.matrixL()), jitter};
    }
  }
  throw ConditioningError("K_uu is not positive definite even after jitter escalation to 1e-4");
}

// Factorizes the FITC system for fixed hyperparameters. sqdist matrices are
// hyperparameter-independent and precomputed once per fit.
Factors factorize(const KernelParams& kernel, const Eigen::MatrixXd& sqdist_uu,
                  const Eigen::MatrixXd& sqdist_ux, const Eigen::VectorXd& residual) {
  const Eigen::Index m = sqdist_uu.rows();
  const Eigen::Index n = residual.size();
  const double sf2 = kernel.signal_variance();
  const double noise = std::max(kernel.noise_variance(), kNoiseFloor);

  Factors out;
  const Eigen::MatrixXd kuu = kernel_from_sqdist(kernel, sqdist_uu);
  auto [l_uu, jitter] = chol_with_jitter(kuu);
  out.l_uu = std::move(l_uu);
  out.added_jitter = jitter;

  const Eigen::MatrixXd kux = kernel_from_sqdist(kernel, sqdist_ux);
  const Eigen::MatrixXd v =
      out.l_uu.triangularView<Eigen::Lower>().solve(kux);  // m x n

  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double q_ii = v.col(i).squaredNorm();
    d[i] = std::max(sf2 - q_ii, 0.0) + noise;  // Lambda_ii + sigma^2
  }

  const Eigen::ArrayXd inv_sqrt_d = d.array().rsqrt();
  Eigen::MatrixXd w_scaled = v;
  for (Eigen::Index i = 0; i < n; ++i) w_scaled.col(i) *= inv_sqrt_d[i];

  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(m, m);
  b.selfadjointView<Eigen::Lower>().rankUpdate(w_scaled);
  Eigen::LLT<Eigen::MatrixXd> llt_b(b.selfadjointView<Eigen::Lower>());
  if (llt_b.info() != Eigen::Success) {
    throw ConditioningError("FITC inner system B is not positive definite");
  }
  out.l_b = llt_b.matrixL();

  const Eigen::VectorXd rd = residual.array() / d.array();
  const Eigen::VectorXd c = v * rd;                                      // m
  const Eigen::VectorXd t = out.l_b.triangularView<Eigen::Lower>().solve(c);
  const double quad = residual.dot(rd) - t.squaredNorm();

  double log_det = out.l_b.diagonal().array().log().sum() * 2.0;
  log_det += d.array().log().sum();

  out.log_marginal_likelihood =
      -0.5 * (quad + log_det + static_cast<double>(n) * kLogTwoPi);

  // w = L^-T B^-1 V D^-1 r; the B^-1 solve reuses L_B.
  Eigen::VectorXd s = out.l_b.triangularView<Eigen::Lower>().solve(c);
  s = out.l_b.transpose().triangularView<Eigen::Upper>().solve(s);
  out.weights = out.l_uu.transpose().triangularView<Eigen::Upper>().solve(s);
  return out;
}

// k-means++-style seeding on the training inputs: first point uniform, each
// next drawn with probability proportional to squared distance from the
// chosen set. Points are then held fixed (not optimized).
Eigen::MatrixXd select_inducing_points(const Eigen::MatrixXd& x, Eigen::Index m,
                                       std::uint64_t seed) {
  const Eigen::Index n = x.rows();
  if (m >= n) return x;

  core::Rng rng(core::derive_seed(seed, 0x1d0cu));
  std::vector<Eigen::Index> chosen;
  chosen.reserve(static_cast<std::size_t>(m));
  std::vector<char> used(static_cast<std::size_t>(n), 0);

  const auto first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
  chosen.push_back(first);
  used[static_cast<std::size_t>(first)] = 1;

  Eigen::VectorXd min_sq(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    min_sq[i] = (x.row(i) - x.row(first)).squaredNorm();
  }

  while (static_cast<Eigen::Index>(chosen.size()) < m) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!used[static_cast<std::size_t>(i)]) total += min_sq[i];
    }
    Eigen::Index pick = -1;
    if (total > 1e-300) {
      const double target = rng.uniform01() * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (used[static_cast<std::size_t>(i)]) continue;
        acc += min_sq[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    }
    if (pick < 0) {  // all remaining points coincide with chosen ones
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!used[static_cast<std::size_t>(i)]) {
          pick = i;
          break;
        }
      }
    }
    used[static_cast<std::size_t>(pick)] = 1;
    chosen.push_back(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      min_sq[i] = std::min(min_sq[i], (x.row(i) - x.row(pick)).squaredNorm());
    }
  }

  Eigen::MatrixXd z(m, x.cols());
  for (Eigen::Index k = 0; k < m; ++k) z.row(k) = x.row(chosen[static_cast<std::size_t>(k)]);
  return z;
}

}  // namespace

FitcModel::FitcModel(const FitcModel& other)
    : kernel_(other.kernel_),
      z_(other.z_),
      weights_(other.weights_),
      l_uu_(other.l_uu_),
      l_b_(other.l_b_),
      prior_mean_(other.prior_mean_),
      summary_(other.summary_),
      variance_clamps_(other.variance_clamps_.load()) {}

FitcModel& FitcModel::operator=(const FitcModel& other) {
  if (this != &other) {
    kernel_ = other.kernel_;
    z_ = other.z_;
    weights_ = other.weights_;
    l_uu_ = other.l_uu_;
    l_b_ = other.l_b_;
    prior_mean_ = other.prior_mean_;
    summary_ = other.summary_;
    variance_clamps_.store(other.variance_clamps_.load());
  }
  return *this;
}

Eigen::Index FitcModel::default_inducing_count(Eigen::Index n) {
  const Eigen::Index fifth = (n + 4) / 5;
  return std::min<Eigen::Index>(n, std::max<Eigen::Index>(50, fifth));
}

FitcModel FitcModel::build(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           const Eigen::MatrixXd& z, const KernelParams& kernel) {
  if (x.rows() != y.size()) throw ArgumentError("FITC build: rows of X and Y differ");
  if (x.cols() != z.cols()) throw ArgumentError("FITC build: X and Z dimensions differ");
  if (z.rows() < 1 || z.rows() > x.rows()) {
    throw ArgumentError("FITC build: inducing count must satisfy 1 <= m <= n");
  }

  FitcModel model;
  model.kernel_ = kernel;
  model.z_ = z;
  model.prior_mean_ = y.mean();

  const Eigen::MatrixXd sqdist_uu = squared_distances(z, z);
  const Eigen::MatrixXd sqdist_ux = squared_distances(z, x);
  const Eigen::VectorXd residual = y.array() - model.prior_mean_;
  Factors factors = factorize(kernel, sqdist_uu, sqdist_ux, residual);

  model.weights_ = std::move(factors.weights);
  model.l_uu_ = std::move(factors.l_uu);
  model.l_b_ = std::move(factors.l_b);
  model.summary_.n = x.rows();
  model.summary_.m = z.rows();
  model.summary_.log_marginal_likelihood = factors.log_marginal_likelihood;
  model.summary_.added_jitter = factors.added_jitter;
  return model;
}

FitcModel FitcModel::fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Eigen::Index m,
                         std::uint64_t seed, const FitConfig& config) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw ArgumentError("FITC fit requires at least two samples");
  if (m < 1 || m > n) throw ArgumentError("FITC fit: inducing count must satisfy 1 <= m <= n");
  if (y.size() != n) throw ArgumentError("FITC fit: rows of X and Y differ");

  const Eigen::MatrixXd z = select_inducing_points(x, m, seed);
  const double prior_mean = y.mean();
  const Eigen::VectorXd residual = y.array() - prior_mean;
  const double y_var = n > 1 ? residual.squaredNorm() / static_cast<double>(n - 1) : 1.0;
  const double y_scale = std::max(y_var, 1e-12);

  const Eigen::MatrixXd sqdist_uu = squared_distances(z, z);
  const Eigen::MatrixXd sqdist_ux = squared_distances(z, x);

  const double dim_scale = std::sqrt(static_cast<double>(x.cols()));
  Eigen::Vector3d lo(std::log(1e-6 * y_scale), std::log(1e-3), std::log(1e-12 * y_scale));
  Eigen::Vector3d hi(std::log(1e4 * y_scale), std::log(50.0 * dim_scale),
                     std::log(10.0 * y_scale));

  int total_evals = 0;
  auto negative_lml = [&](const Eigen::VectorXd& theta) {
    ++total_evals;
    const KernelParams k = KernelParams::from_log_vector(theta);
    try {
      return -factorize(k, sqdist_uu, sqdist_ux, residual).log_marginal_likelihood;
    } catch (const ConditioningError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  // Start 0 is a fixed heuristic; the rest are seeded log-uniform draws.
  core::Rng rng(core::derive_seed(seed, 0x57a7u));
  std::vector<Eigen::Vector3d> starts;
  starts.emplace_back(std::log(y_scale), std::log(0.5 * dim_scale), std::log(1e-3 * y_scale));
  for (int s = 1; s < config.n_starts; ++s) {
    Eigen::Vector3d theta;
    theta[0] = std::log(y_scale) + rng.uniform(std::log(0.25), std::log(4.0));
    theta[1] = rng.uniform(std::log(0.05), std::log(2.0 * dim_scale));
    theta[2] = std::log(y_scale) + rng.uniform(std::log(1e-7), std::log(1e-1));
    starts.push_back(theta);
  }

  core::BoxMinOptions opts;
  opts.max_iter = config.max_iter;
  opts.grad_tol = config.grad_tol;
  opts.step_tol = config.step_tol;
  opts.fd_step = 1e-5;

  double best_value = std::numeric_limits<double>::infinity();
  Eigen::Vector3d best_theta = starts.front();
  int best_iterations = 0;
  for (const auto& start : starts) {
    const core::BoxMinResult r = box_minimize(negative_lml, nullptr, start, lo, hi, opts);
    if (r.value < best_value) {
      best_value = r.value;
      best_theta = r.x;
      best_iterations = r.iterations;
    }
  }
  if (!std::isfinite(best_value)) {
    throw ConditioningError("FITC hyperparameter optimization failed from every start");
  }

  FitcModel model = build(x, y, z, KernelParams::from_log_vector(best_theta));
  model.summary_.seed = seed;
  model.summary_.iterations = best_iterations;
  model.summary_.evaluations = total_evals;
  return model;
}

FitcModel FitcModel::from_parts(KernelParams kernel, Eigen::MatrixXd z, Eigen::VectorXd weights,
                                Eigen::MatrixXd l_uu, Eigen::MatrixXd l_b, double prior_mean,
                                TrainingSummary summary) {
  FitcModel model;
  model.kernel_ = kernel;
  model.z_ = std::move(z);
  model.weights_ = std::move(weights);
  model.l_uu_ = std::move(l_uu);
  model.l_b_ = std::move(l_b);
  model.prior_mean_ = prior_mean;
  model.summary_ = summary;
  return model;
}

void FitcModel::check_point(const Eigen::VectorXd& x_star) const {
  if (x_star.size() != z_.cols()) {
    throw ArgumentError("predict: point dimension differs from the model input dimension");
  }
  if (!x_star.allFinite()) throw ArgumentError("predict: point must be finite");
}

Prediction FitcModel::predict(const Eigen::VectorXd& x_star) const {
  check_point(x_star);
  const Eigen::Index m = z_.rows();
  const double l = kernel_.length_scale();
  const double inv_2l2 = -0.5 / (l * l);
  const double sf2 = kernel_.signal_variance();

  Eigen::VectorXd k_star(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    k_star[j] = sf2 * std::exp(inv_2l2 * (x_star.transpose() - z_.row(j)).squaredNorm());
  }

  Prediction p;
  p.mean = prior_mean_ + k_star.dot(weights_);

  const Eigen::VectorXd a = l_uu_.triangularView<Eigen::Lower>().solve(k_star);
  const Eigen::VectorXd b = l_b_.triangularView<Eigen::Lower>().solve(a);
  p.variance = sf2 - a.squaredNorm() + b.squaredNorm();
  if (p.variance < 0.0) {
    variance_clamps_.fetch_add(1);
    p.variance = 0.0;
  }
  return p;
}

Eigen::VectorXd FitcModel::predict_mean_gradient(const Eigen::VectorXd& x_star) const {
  check_point(x_star);
  const Eigen::Index m = z_.rows();
  const double l = kernel_.length_scale();
  const double inv_l2 = 1.0 / (l * l);
  const double inv_2l2 = -0.5 * inv_l2;
  const double sf2 = kernel_.signal_variance();

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(x_star.size());
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::VectorXd diff = z_.row(j).transpose() - x_star;
    const double k_j = sf2 * std::exp(inv_2l2 * diff.squaredNorm());
    grad += weights_[j] * k_j * inv_l2 * diff;
  }
  return grad;
}

}  // namespace couplekit::sgp
