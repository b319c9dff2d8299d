#include "couplekit/core/design_space.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "couplekit/core/errors.hpp"

namespace couplekit::core {

namespace {

double bound_tolerance(const DesignVariable& v) {
  return 1e-12 * std::max({1.0, std::abs(v.lower), std::abs(v.upper)});
}

}  // namespace

std::string to_string(VariableRole role) {
  return role == VariableRole::plant ? "plant" : "control";
}

VariableRole role_from_string(const std::string& text) {
  if (text == "plant") return VariableRole::plant;
  if (text == "control") return VariableRole::control;
  throw ArgumentError("unknown variable role '" + text + "' (expected plant or control)");
}

DesignSpace::DesignSpace(std::vector<DesignVariable> variables,
                         std::map<std::string, double> fixed_parameters)
    : variables_(std::move(variables)), fixed_parameters_(std::move(fixed_parameters)) {
  if (variables_.empty()) throw ArgumentError("design space requires at least one variable");
  for (Eigen::Index i = 0; i < size(); ++i) {
    const DesignVariable& v = variables_[i];
    if (v.name.empty()) throw ArgumentError("design variable name must be non-empty");
    if (!(v.lower < v.upper)) {
      throw ArgumentError("variable '" + v.name + "': lower bound must be < upper bound");
    }
    if (!(v.lower <= v.nominal && v.nominal <= v.upper)) {
      throw ArgumentError("variable '" + v.name + "': nominal must lie within bounds");
    }
    if (!std::isfinite(v.lower) || !std::isfinite(v.upper) || !std::isfinite(v.nominal)) {
      throw ArgumentError("variable '" + v.name + "': bounds and nominal must be finite");
    }
    if (!index_.emplace(v.name, i).second) {
      throw ArgumentError("duplicate variable name '" + v.name + "'");
    }
  }
}

Eigen::Index DesignSpace::index_of(const std::string& name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) throw ArgumentError("unknown variable '" + name + "'");
  return it->second;
}

bool DesignSpace::has_variable(const std::string& name) const {
  return index_.count(name) != 0;
}

std::vector<std::string> DesignSpace::variable_names() const {
  std::vector<std::string> names;
  names.reserve(variables_.size());
  for (const auto& v : variables_) names.push_back(v.name);
  return names;
}

Eigen::VectorXd DesignSpace::lower_bounds() const {
  Eigen::VectorXd lo(size());
  for (Eigen::Index i = 0; i < size(); ++i) lo[i] = variables_[i].lower;
  return lo;
}

Eigen::VectorXd DesignSpace::upper_bounds() const {
  Eigen::VectorXd hi(size());
  for (Eigen::Index i = 0; i < size(); ++i) hi[i] = variables_[i].upper;
  return hi;
}

Eigen::VectorXd DesignSpace::nominal_point() const {
  Eigen::VectorXd x(size());
  for (Eigen::Index i = 0; i < size(); ++i) x[i] = variables_[i].nominal;
  return x;
}

Eigen::VectorXd DesignSpace::spans() const {
  Eigen::VectorXd s(size());
  for (Eigen::Index i = 0; i < size(); ++i) s[i] = variables_[i].upper - variables_[i].lower;
  return s;
}

double DesignSpace::normalize_component(Eigen::Index i, double x) const {
  const DesignVariable& v = variables_.at(i);
  const double tol = bound_tolerance(v);
  if (!std::isfinite(x) || x < v.lower - tol || x > v.upper + tol) {
    throw BoundsError("variable '" + v.name + "': value " + std::to_string(x) +
                      " outside bounds [" + std::to_string(v.lower) + ", " +
                      std::to_string(v.upper) + "]");
  }
  const double u = (x - v.lower) / (v.upper - v.lower);
  return std::clamp(u, 0.0, 1.0);
}

Eigen::VectorXd DesignSpace::normalize(const Eigen::VectorXd& x) const {
  if (x.size() != size()) throw ArgumentError("normalize: dimension mismatch");
  Eigen::VectorXd u(size());
  for (Eigen::Index i = 0; i < size(); ++i) u[i] = normalize_component(i, x[i]);
  return u;
}

double DesignSpace::denormalize_component(Eigen::Index i, double u) const {
  const DesignVariable& v = variables_.at(i);
  if (!std::isfinite(u) || u < -1e-12 || u > 1.0 + 1e-12) {
    throw DomainError("variable '" + v.name + "': normalized value " + std::to_string(u) +
                      " outside [0, 1]");
  }
  const double uc = std::clamp(u, 0.0, 1.0);
  return v.lower + uc * (v.upper - v.lower);
}

Eigen::VectorXd DesignSpace::denormalize(const Eigen::VectorXd& u) const {
  if (u.size() != size()) throw ArgumentError("denormalize: dimension mismatch");
  Eigen::VectorXd x(size());
  for (Eigen::Index i = 0; i < size(); ++i) x[i] = denormalize_component(i, u[i]);
  return x;
}

DesignSpace DesignSpace::permuted(const std::vector<Eigen::Index>& order) const {
  if (order.size() != variables_.size()) throw ArgumentError("permutation size mismatch");
  std::vector<DesignVariable> vars;
  vars.reserve(order.size());
  std::set<Eigen::Index> seen;
  for (Eigen::Index old : order) {
    if (old < 0 || old >= size() || !seen.insert(old).second) {
      throw ArgumentError("invalid permutation of design variables");
    }
    vars.push_back(variables_[old]);
  }
  return DesignSpace(std::move(vars), fixed_parameters_);
}

bool DesignSpace::operator==(const DesignSpace& other) const {
  if (size() != other.size() || fixed_parameters_ != other.fixed_parameters_) return false;
  for (Eigen::Index i = 0; i < size(); ++i) {
    const auto& a = variables_[i];
    const auto& b = other.variables_[i];
    if (a.name != b.name || a.lower != b.lower || a.upper != b.upper ||
        a.nominal != b.nominal || a.role != b.role) {
      return false;
    }
  }
  return true;
}

void to_json(nlohmann::json& j, const DesignSpace& space) {
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& v : space.variables()) {
    vars.push_back({{"name", v.name},
                    {"lower", v.lower},
                    {"upper", v.upper},
                    {"nominal", v.nominal},
                    {"role", to_string(v.role)}});
  }
  j = nlohmann::json{{"variables", std::move(vars)},
                     {"fixed_parameters", space.fixed_parameters()}};
}

DesignSpace design_space_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("variables") || !j.at("variables").is_array()) {
    throw IoError("design space JSON must contain a 'variables' array");
  }
  std::vector<DesignVariable> vars;
  for (const auto& e : j.at("variables")) {
    DesignVariable v;
    v.name = e.at("name").get<std::string>();
    v.lower = e.at("lower").get<double>();
    v.upper = e.at("upper").get<double>();
    v.nominal = e.at("nominal").get<double>();
    v.role = role_from_string(e.value("role", "plant"));
    vars.push_back(std::move(v));
  }
  std::map<std::string, double> fixed;
  if (j.contains("fixed_parameters")) {
    fixed = j.at("fixed_parameters").get<std::map<std::string, double>>();
  }
  return DesignSpace(std::move(vars), std::move(fixed));
}

DesignSpace load_design_space(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open design space file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("invalid JSON in '" + path + "': " + e.what());
  }
  return design_space_from_json(j);
}

void save_design_space(const std::string& path, const DesignSpace& space) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write design space file '" + path + "'");
  nlohmann::json j;
  to_json(j, space);
  out << j.dump(2) << "\n";
}

}  // namespace couplekit::core
