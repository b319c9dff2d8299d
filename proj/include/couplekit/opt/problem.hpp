#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "couplekit/opt/response.hpp"

namespace couplekit::opt {

enum class ConstraintDirection { le, ge };

std::string to_string(ConstraintDirection d);
ConstraintDirection direction_from_string(const std::string& text);

/// Inequality constraint on a named channel: value <= limit (le) or
/// value >= limit (ge), with the limit in model units.
struct Constraint {
  std::string channel;
  double limit = 0.0;
  ConstraintDirection direction = ConstraintDirection::le;
};

/// Binds a design space to response surfaces: one objective channel
/// (minimized) plus inequality constraints. Immutable in use; surfaces are
/// shared so concurrent solves are safe.
struct ProblemDefinition {
  std::shared_ptr<const core::DesignSpace> space;
  std::string objective;
  std::vector<Constraint> constraints;
  std::map<std::string, std::shared_ptr<const ResponseSurface>> surfaces;

  void validate() const;
  const ResponseSurface& surface(const std::string& name) const;
  const core::DesignSpace& design_space() const { return *space; }
};

/// Reads a problem JSON ({"objective", "constraints", "model_files"}) and
/// loads the referenced model artifacts. All models must share one design
/// space; paths are resolved relative to the problem file's directory.
ProblemDefinition load_problem(const std::string& path);

}  // namespace couplekit::opt
