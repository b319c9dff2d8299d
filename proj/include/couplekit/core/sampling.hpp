#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace couplekit::core {

class DesignSpace;

/// Latin hypercube sample on the unit cube: each of the n rows falls in a
/// distinct stratum [k/n, (k+1)/n) per dimension, jittered uniformly within
/// its stratum, with independent per-dimension permutations. Deterministic
/// for a fixed seed.
Eigen::MatrixXd latin_hypercube_unit(Eigen::Index n, Eigen::Index dims, std::uint64_t seed);

/// Same sample mapped to the design space bounds (model units).
Eigen::MatrixXd latin_hypercube(const DesignSpace& space, Eigen::Index n, std::uint64_t seed);

}  // namespace couplekit::core
