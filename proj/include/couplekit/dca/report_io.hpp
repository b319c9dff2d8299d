#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "couplekit/dca/sweep.hpp"

namespace couplekit::dca {

/// Full report serialization, including per-cell diagnostics. Deterministic:
/// two identical runs produce byte-identical JSON.
nlohmann::json report_to_json(const CouplingReport& report);
CouplingReport report_from_json(const nlohmann::json& j);

void save_report(const std::string& path, const CouplingReport& report);
CouplingReport load_report(const std::string& path);

/// One CSV per matrix; variable-name header row and column, masked entries
/// left empty.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& matrix,
                      const Eigen::MatrixXi& mask, const std::vector<std::string>& names);

}  // namespace couplekit::dca
