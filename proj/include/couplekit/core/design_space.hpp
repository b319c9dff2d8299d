#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace couplekit::core {

enum class VariableRole { plant, control };

std::string to_string(VariableRole role);
VariableRole role_from_string(const std::string& text);

/// One named design variable with bounds and a nominal value in model units.
struct DesignVariable {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  double nominal = 0.5;
  VariableRole role = VariableRole::plant;
};

/// Ordered collection of design variables plus fixed parameters. Owns the
/// min-max normalization between model units and the unit hypercube; the
/// variable order defines the index order of every matrix and report built
/// on top of it. Immutable after construction.
class DesignSpace {
 public:
  DesignSpace(std::vector<DesignVariable> variables,
              std::map<std::string, double> fixed_parameters = {});

  Eigen::Index size() const { return static_cast<Eigen::Index>(variables_.size()); }
  const std::vector<DesignVariable>& variables() const { return variables_; }
  const DesignVariable& variable(Eigen::Index i) const { return variables_.at(i); }
  const std::map<std::string, double>& fixed_parameters() const { return fixed_parameters_; }

  /// Index of a variable by name; throws ArgumentError if unknown.
  Eigen::Index index_of(const std::string& name) const;
  bool has_variable(const std::string& name) const;

  std::vector<std::string> variable_names() const;
  Eigen::VectorXd lower_bounds() const;
  Eigen::VectorXd upper_bounds() const;
  Eigen::VectorXd nominal_point() const;
  Eigen::VectorXd spans() const;

  /// Model units -> [0,1]^n. Components must lie within bounds (tolerance
  /// 1e-12 relative to the bound magnitudes); violations name the variable.
  Eigen::VectorXd normalize(const Eigen::VectorXd& x) const;
  double normalize_component(Eigen::Index i, double x) const;

  /// [0,1]^n -> model units. Components outside [0,1] beyond 1e-12 throw.
  Eigen::VectorXd denormalize(const Eigen::VectorXd& u) const;
  double denormalize_component(Eigen::Index i, double u) const;

  /// Reordered copy; `order[k]` is the old index of the new k-th variable.
  DesignSpace permuted(const std::vector<Eigen::Index>& order) const;

  bool operator==(const DesignSpace& other) const;

 private:
  std::vector<DesignVariable> variables_;
  std::map<std::string, double> fixed_parameters_;
  std::map<std::string, Eigen::Index> index_;
};

void to_json(nlohmann::json& j, const DesignSpace& space);
DesignSpace design_space_from_json(const nlohmann::json& j);

DesignSpace load_design_space(const std::string& path);
void save_design_space(const std::string& path, const DesignSpace& space);

}  // namespace couplekit::core
