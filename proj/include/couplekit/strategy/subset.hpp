#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "couplekit/dca/sweep.hpp"

namespace couplekit::strategy {

enum class SubsetMode { sensitivity_only, coupling_aware };

std::string to_string(SubsetMode mode);
SubsetMode subset_mode_from_string(const std::string& text);

/// Statistic turning a J_psi column into one sensitivity score per
/// variable. The conservative column max is the default; the mean is
/// exposed as an alternative.
enum class SensitivityStatistic { column_max, column_mean };

struct SubsetSelection {
  std::vector<Eigen::Index> chosen;  // in selection order; first = top sensitivity
  std::vector<std::string> variable_names;
  SubsetMode mode = SubsetMode::sensitivity_only;
  nlohmann::json trace = nlohmann::json::array();

  std::vector<std::string> chosen_names() const;
};

/// Per-variable objective sensitivity: column statistic over the unmasked
/// J_psi entries.
Eigen::VectorXd sensitivity_scores(const dca::CouplingReport& report,
                                   SensitivityStatistic statistic = SensitivityStatistic::column_max);

/// Picks k variables. sensitivity_only takes the top scores outright;
/// coupling_aware seeds with the top-sensitivity variable and greedily adds
/// the variable most strongly coupled (either direction) to the selection.
/// Ties break toward the higher sensitivity score, then the lower index.
SubsetSelection select_subset(const dca::CouplingReport& report, Eigen::Index k, SubsetMode mode,
                              SensitivityStatistic statistic = SensitivityStatistic::column_max);

nlohmann::json subset_to_json(const SubsetSelection& selection);
void save_subset(const std::string& path, const SubsetSelection& selection);
SubsetSelection load_subset(const std::string& path);

}  // namespace couplekit::strategy
