#include "couplekit/core/sampling.hpp"

#include <numeric>
#include <vector>

#include "couplekit/core/design_space.hpp"
#include "couplekit/core/errors.hpp"
#include "couplekit/core/rng.hpp"

namespace couplekit::core {

Eigen::MatrixXd latin_hypercube_unit(Eigen::Index n, Eigen::Index dims, std::uint64_t seed) {
  if (n < 2) throw ArgumentError("latin hypercube sampling requires n >= 2");
  if (dims < 1) throw ArgumentError("latin hypercube sampling requires at least one dimension");

  Rng rng(derive_seed(seed, 0x1b5u));
  Eigen::MatrixXd samples(n, dims);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index d = 0; d < dims; ++d) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    rng.shuffle(order);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double jitter = rng.uniform01();
      samples(order[static_cast<std::size_t>(k)], d) =
          (static_cast<double>(k) + jitter) / static_cast<double>(n);
    }
  }
  return samples;
}

Eigen::MatrixXd latin_hypercube(const DesignSpace& space, Eigen::Index n, std::uint64_t seed) {
  Eigen::MatrixXd unit = latin_hypercube_unit(n, space.size(), seed);
  const Eigen::VectorXd lo = space.lower_bounds();
  const Eigen::VectorXd span = space.spans();
  for (Eigen::Index d = 0; d < space.size(); ++d) {
    unit.col(d) = (lo[d] + span[d] * unit.col(d).array()).matrix();
  }
  return unit;
}

}  // namespace couplekit::core
