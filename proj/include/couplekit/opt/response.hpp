#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>

#include "couplekit/core/dataset.hpp"
#include "couplekit/core/design_space.hpp"
#include "couplekit/sgp/model_io.hpp"

namespace couplekit::opt {

/// One output channel as a smooth function over the normalized design cube.
/// Values and gradients are in standardized channel units; standardization()
/// maps them back to model units. Implementations must be pure and reentrant.
class ResponseSurface {
 public:
  virtual ~ResponseSurface() = default;

  virtual Eigen::Index dimension() const = 0;
  virtual double value(const Eigen::VectorXd& u) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& u) const = 0;
  virtual const core::Standardization& standardization() const = 0;

  double value_model(const Eigen::VectorXd& u) const {
    return standardization().to_model(value(u));
  }
};

/// Trained FITC surrogate as a response surface.
class SurrogateSurface final : public ResponseSurface {
 public:
  explicit SurrogateSurface(sgp::TrainedChannel channel) : channel_(std::move(channel)) {}

  Eigen::Index dimension() const override { return channel_.model.inducing_points().cols(); }
  double value(const Eigen::VectorXd& u) const override { return channel_.model.predict(u).mean; }
  Eigen::VectorXd gradient(const Eigen::VectorXd& u) const override {
    return channel_.model.predict_mean_gradient(u);
  }
  const core::Standardization& standardization() const override {
    return channel_.standardization;
  }

  const sgp::TrainedChannel& channel() const { return channel_; }

 private:
  sgp::TrainedChannel channel_;
};

/// Closed-form channel (benchmarks, oracles). Callables take model-unit
/// points in the order of the attached space; gradients are chained through
/// the normalization so that the surface lives on the unit cube like any
/// surrogate. Standardization defaults to the identity.
class AnalyticSurface final : public ResponseSurface {
 public:
  using ValueFn = std::function<double(const Eigen::VectorXd&)>;
  using GradientFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  AnalyticSurface(std::shared_ptr<const core::DesignSpace> space, ValueFn value,
                  GradientFn gradient = nullptr,
                  core::Standardization standardization = {0.0, 1.0});

  Eigen::Index dimension() const override { return space_->size(); }
  double value(const Eigen::VectorXd& u) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& u) const override;
  const core::Standardization& standardization() const override { return standardization_; }

 private:
  std::shared_ptr<const core::DesignSpace> space_;
  ValueFn value_fn_;
  GradientFn gradient_fn_;
  core::Standardization standardization_;
};

}  // namespace couplekit::opt
