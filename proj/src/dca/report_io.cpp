#include "couplekit/dca/report_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "couplekit/core/dataset.hpp"
#include "couplekit/core/errors.hpp"
#include "couplekit/core/json_util.hpp"

namespace couplekit::dca {

namespace {

nlohmann::json mask_to_json(const Eigen::MatrixXi& mask) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < mask.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < mask.cols(); ++j) row.push_back(mask(i, j) != 0);
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXi mask_from_json(const nlohmann::json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j.front().size()) : 0;
  Eigen::MatrixXi m(rows, cols);
  Eigen::Index r = 0;
  for (const auto& row : j) {
    Eigen::Index c = 0;
    for (const auto& e : row) m(r, c++) = e.get<bool>() ? 1 : 0;
    ++r;
  }
  return m;
}

nlohmann::json cell_to_json(const SweepCell& cell) {
  nlohmann::json included = nlohmann::json::array();
  for (char flag : cell.included) included.push_back(flag != 0);
  // NaNs (excluded points) are stored as nulls to stay valid JSON.
  nlohmann::json x_opt = nlohmann::json::array();
  nlohmann::json psi = nlohmann::json::array();
  for (Eigen::Index i = 0; i < cell.grid_u.size(); ++i) {
    if (cell.included[static_cast<std::size_t>(i)]) {
      x_opt.push_back(cell.x_opt_u[i]);
      psi.push_back(cell.psi_std[i]);
    } else {
      x_opt.push_back(nullptr);
      psi.push_back(nullptr);
    }
  }
  return nlohmann::json{{"optimized", cell.optimized},
                        {"perturbed", cell.perturbed},
                        {"grid_u", core::to_json_array(cell.grid_u)},
                        {"x_opt_u", std::move(x_opt)},
                        {"psi_std", std::move(psi)},
                        {"included", std::move(included)},
                        {"dx_samples", core::to_json_array(cell.dx_samples)},
                        {"dpsi_samples", core::to_json_array(cell.dpsi_samples)},
                        {"excluded_count", cell.excluded_count},
                        {"bound_flat_count", cell.bound_flat_count},
                        {"available", cell.available}};
}

SweepCell cell_from_json(const nlohmann::json& j) {
  SweepCell cell;
  cell.optimized = j.at("optimized").get<Eigen::Index>();
  cell.perturbed = j.at("perturbed").get<Eigen::Index>();
  cell.grid_u = core::vector_from_json(j.at("grid_u"));
  const auto n = cell.grid_u.size();
  cell.x_opt_u = Eigen::VectorXd::Constant(n, std::nan(""));
  cell.psi_std = Eigen::VectorXd::Constant(n, std::nan(""));
  cell.included.assign(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& x = j.at("x_opt_u").at(static_cast<std::size_t>(i));
    const auto& p = j.at("psi_std").at(static_cast<std::size_t>(i));
    if (!x.is_null()) cell.x_opt_u[i] = x.get<double>();
    if (!p.is_null()) cell.psi_std[i] = p.get<double>();
    cell.included[static_cast<std::size_t>(i)] =
        j.at("included").at(static_cast<std::size_t>(i)).get<bool>() ? 1 : 0;
  }
  cell.dx_samples = core::vector_from_json(j.at("dx_samples"));
  cell.dpsi_samples = core::vector_from_json(j.at("dpsi_samples"));
  cell.excluded_count = j.at("excluded_count").get<int>();
  cell.bound_flat_count = j.at("bound_flat_count").get<int>();
  cell.available = j.at("available").get<bool>();
  return cell;
}

}  // namespace

nlohmann::json report_to_json(const CouplingReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& cell : report.cells) cells.push_back(cell_to_json(cell));
  return nlohmann::json{
      {"format", "couplekit-dca-report"},
      {"version", 1},
      {"variables", report.variable_names},
      {"j_x", core::to_json_array(report.j_x)},
      {"j_psi", core::to_json_array(report.j_psi)},
      {"mask", mask_to_json(report.mask)},
      {"config",
       {{"n_sweep", report.config.n_sweep},
        {"norm", to_string(report.config.norm)},
        {"scheme", to_string(report.config.scheme)},
        {"infeasible", to_string(report.config.infeasible)},
        {"seed", report.config.seed},
        {"n_starts", report.config.n_starts}}},
      {"cells", std::move(cells)},
  };
}

CouplingReport report_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "couplekit-dca-report") {
    throw IoError("not a couplekit DCA report");
  }
  CouplingReport report;
  report.variable_names = j.at("variables").get<std::vector<std::string>>();
  report.j_x = core::matrix_from_json(j.at("j_x"));
  report.j_psi = core::matrix_from_json(j.at("j_psi"));
  report.mask = mask_from_json(j.at("mask"));
  const auto& c = j.at("config");
  report.config.n_sweep = c.at("n_sweep").get<int>();
  report.config.norm = norm_from_string(c.at("norm").get<std::string>());
  report.config.scheme = scheme_from_string(c.at("scheme").get<std::string>());
  report.config.infeasible = policy_from_string(c.at("infeasible").get<std::string>());
  report.config.seed = c.at("seed").get<std::uint64_t>();
  report.config.n_starts = c.at("n_starts").get<int>();
  if (j.contains("cells")) {
    for (const auto& cell : j.at("cells")) report.cells.push_back(cell_from_json(cell));
  }
  return report;
}

void save_report(const std::string& path, const CouplingReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report file '" + path + "'");
  out << report_to_json(report).dump(2) << "\n";
}

CouplingReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open report file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("invalid JSON in report file '" + path + "': " + e.what());
  }
  return report_from_json(j);
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& matrix,
                      const Eigen::MatrixXi& mask, const std::vector<std::string>& names) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write CSV file '" + path + "'");
  out << "variable";
  for (const auto& name : names) out << "," << name;
  out << "\n";
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    out << names.at(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      out << ",";
      if (!mask(i, j)) out << core::format_double(matrix(i, j));
    }
    out << "\n";
  }
}

}  // namespace couplekit::dca
