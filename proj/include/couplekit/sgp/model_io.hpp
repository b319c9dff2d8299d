#pragma once

#include <string>

#include "couplekit/core/dataset.hpp"
#include "couplekit/core/design_space.hpp"
#include "couplekit/sgp/fitc.hpp"

namespace couplekit::sgp {

/// A FITC model for one named output channel together with the z-score
/// constants that map its standardized predictions back to model units.
struct TrainedChannel {
  std::string name;
  core::Standardization standardization;
  FitcModel model;
};

/// Normalizes inputs through the space, z-scores the named output column,
/// and fits a FITC model to it.
TrainedChannel train_channel(const core::DesignSpace& space, const core::Dataset& data,
                             const std::string& channel, Eigen::Index m, std::uint64_t seed,
                             const FitConfig& config = {});

/// Model artifact JSON. Self-contained: includes the design space snapshot
/// so predictions in model units need no other file. Reloading reproduces
/// predictions bit-for-bit (all factors are stored, not recomputed).
void save_channel(const std::string& path, const TrainedChannel& channel,
                  const core::DesignSpace& space);

struct LoadedChannel {
  TrainedChannel channel;
  core::DesignSpace space;
};

LoadedChannel load_channel(const std::string& path);

}  // namespace couplekit::sgp
