#include "couplekit/opt/problem.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "couplekit/core/errors.hpp"

namespace couplekit::opt {

std::string to_string(ConstraintDirection d) {
  return d == ConstraintDirection::le ? "le" : "ge";
}

ConstraintDirection direction_from_string(const std::string& text) {
  if (text == "le" || text == "<=") return ConstraintDirection::le;
  if (text == "ge" || text == ">=") return ConstraintDirection::ge;
  throw ArgumentError("unknown constraint direction '" + text + "' (expected le or ge)");
}

void ProblemDefinition::validate() const {
  if (!space) throw ArgumentError("problem definition has no design space");
  if (objective.empty()) throw ArgumentError("problem definition has no objective channel");
  surface(objective);
  for (const auto& c : constraints) {
    surface(c.channel);
    if (!std::isfinite(c.limit)) {
      throw ArgumentError("constraint on '" + c.channel + "' has a non-finite limit");
    }
  }
  for (const auto& [name, s] : surfaces) {
    if (!s) throw ArgumentError("channel '" + name + "' has a null surface");
    if (s->dimension() != space->size()) {
      throw ArgumentError("channel '" + name + "' dimension does not match the design space");
    }
  }
}

const ResponseSurface& ProblemDefinition::surface(const std::string& name) const {
  const auto it = surfaces.find(name);
  if (it == surfaces.end() || !it->second) {
    throw ArgumentError("no trained surface for channel '" + name + "'");
  }
  return *it->second;
}

ProblemDefinition load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open problem file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("invalid JSON in problem file '" + path + "': " + e.what());
  }

  ProblemDefinition problem;
  problem.objective = j.at("objective").get<std::string>();
  if (j.contains("constraints")) {
    for (const auto& c : j.at("constraints")) {
      Constraint constraint;
      constraint.channel = c.at("channel").get<std::string>();
      constraint.limit = c.at("limit").get<double>();
      constraint.direction = direction_from_string(c.value("direction", "le"));
      problem.constraints.push_back(std::move(constraint));
    }
  }

  const auto base = std::filesystem::path(path).parent_path();
  std::shared_ptr<const core::DesignSpace> space;
  for (const auto& [channel, file] : j.at("model_files").items()) {
    std::filesystem::path model_path(file.get<std::string>());
    if (model_path.is_relative()) model_path = base / model_path;
    sgp::LoadedChannel loaded = sgp::load_channel(model_path.string());
    if (loaded.channel.name != channel) {
      throw IoError("model file '" + model_path.string() + "' holds channel '" +
                    loaded.channel.name + "', expected '" + channel + "'");
    }
    if (!space) {
      space = std::make_shared<core::DesignSpace>(loaded.space);
    } else if (!(*space == loaded.space)) {
      throw IoError("model files disagree on the design space (channel '" + channel + "')");
    }
    problem.surfaces.emplace(channel,
                             std::make_shared<SurrogateSurface>(std::move(loaded.channel)));
  }
  problem.space = space;
  problem.validate();
  return problem;
}

}  // namespace couplekit::opt
