#include "couplekit/opt/response.hpp"

#include <algorithm>

#include "couplekit/core/errors.hpp"

namespace couplekit::opt {

AnalyticSurface::AnalyticSurface(std::shared_ptr<const core::DesignSpace> space, ValueFn value,
                                 GradientFn gradient, core::Standardization standardization)
    : space_(std::move(space)),
      value_fn_(std::move(value)),
      gradient_fn_(std::move(gradient)),
      standardization_(standardization) {
  if (!space_ || !value_fn_) {
    throw ArgumentError("analytic surface requires a space and a value function");
  }
}

double AnalyticSurface::value(const Eigen::VectorXd& u) const {
  return standardization_.to_standard(value_fn_(space_->denormalize(u)));
}

Eigen::VectorXd AnalyticSurface::gradient(const Eigen::VectorXd& u) const {
  const Eigen::VectorXd x = space_->denormalize(u);
  Eigen::VectorXd g_model;
  if (gradient_fn_) {
    g_model = gradient_fn_(x);
  } else {
    // Finite differences in model units for surfaces without a closed-form
    // gradient. Probe points are clamped to the box (one-sided stencil at
    // an active bound) so value functions are never queried outside it.
    g_model.resize(x.size());
    const Eigen::VectorXd span = space_->spans();
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double h = 1e-6 * span[i];
      const double saved = xp[i];
      const double hi = std::min(saved + h, space_->variable(i).upper);
      const double lo = std::max(saved - h, space_->variable(i).lower);
      xp[i] = hi;
      const double fp = value_fn_(xp);
      xp[i] = lo;
      const double fm = value_fn_(xp);
      xp[i] = saved;
      g_model[i] = (fp - fm) / (hi - lo);
    }
  }
  // d/du = d/dx * span, then into standardized output units.
  return (g_model.array() * space_->spans().array() / standardization_.stddev).matrix();
}

}  // namespace couplekit::opt
