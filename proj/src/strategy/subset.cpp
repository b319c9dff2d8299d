#include "couplekit/strategy/subset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "couplekit/core/errors.hpp"

namespace couplekit::strategy {

std::string to_string(SubsetMode mode) {
  return mode == SubsetMode::sensitivity_only ? "sensitivity_only" : "coupling_aware";
}

SubsetMode subset_mode_from_string(const std::string& text) {
  if (text == "sensitivity_only") return SubsetMode::sensitivity_only;
  if (text == "coupling_aware") return SubsetMode::coupling_aware;
  throw ArgumentError("unknown subset mode '" + text +
                      "' (expected sensitivity_only or coupling_aware)");
}

std::vector<std::string> SubsetSelection::chosen_names() const {
  std::vector<std::string> names;
  for (Eigen::Index i : chosen) names.push_back(variable_names.at(static_cast<std::size_t>(i)));
  return names;
}

Eigen::VectorXd sensitivity_scores(const dca::CouplingReport& report,
                                   SensitivityStatistic statistic) {
  const Eigen::Index n = report.size();
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(n);
  for (Eigen::Index b = 0; b < n; ++b) {
    double best = 0.0, sum = 0.0;
    int count = 0;
    for (Eigen::Index a = 0; a < n; ++a) {
      if (a == b || report.mask(a, b)) continue;
      best = std::max(best, report.j_psi(a, b));
      sum += report.j_psi(a, b);
      ++count;
    }
    scores[b] = statistic == SensitivityStatistic::column_max
                    ? best
                    : (count > 0 ? sum / count : 0.0);
  }
  return scores;
}

SubsetSelection select_subset(const dca::CouplingReport& report, Eigen::Index k, SubsetMode mode,
                              SensitivityStatistic statistic) {
  const Eigen::Index n = report.size();
  if (n == 0) throw ArgumentError("select_subset: empty coupling report");
  if (k < 1 || k > n) {
    throw ArgumentError("select_subset: k must satisfy 1 <= k <= " + std::to_string(n));
  }

  SubsetSelection selection;
  selection.variable_names = report.variable_names;
  selection.mode = mode;

  const Eigen::VectorXd scores = sensitivity_scores(report, statistic);
  {
    nlohmann::json score_json = nlohmann::json::object();
    for (Eigen::Index b = 0; b < n; ++b) {
      score_json[report.variable_names[static_cast<std::size_t>(b)]] = scores[b];
    }
    selection.trace.push_back({{"event", "sensitivity_scores"}, {"scores", std::move(score_json)}});
  }

  if (mode == SubsetMode::sensitivity_only) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return a < b;
    });
    selection.chosen.assign(order.begin(), order.begin() + k);
    for (Eigen::Index i : selection.chosen) {
      selection.trace.push_back(
          {{"event", "pick"},
           {"variable", report.variable_names[static_cast<std::size_t>(i)]},
           {"sensitivity", scores[i]}});
    }
    return selection;
  }

  // coupling_aware: seed with the top-sensitivity variable.
  Eigen::Index seed_var = 0;
  for (Eigen::Index b = 1; b < n; ++b) {
    if (scores[b] > scores[seed_var]) seed_var = b;
  }
  selection.chosen.push_back(seed_var);
  selection.trace.push_back({{"event", "pick"},
                             {"variable", report.variable_names[static_cast<std::size_t>(seed_var)]},
                             {"sensitivity", scores[seed_var]},
                             {"reason", "top sensitivity"}});

  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  taken[static_cast<std::size_t>(seed_var)] = 1;

  while (static_cast<Eigen::Index>(selection.chosen.size()) < k) {
    Eigen::Index best = -1;
    double best_coupling = -1.0;
    nlohmann::json candidates = nlohmann::json::array();
    for (Eigen::Index c = 0; c < n; ++c) {
      if (taken[static_cast<std::size_t>(c)]) continue;
      double coupling = 0.0;
      for (Eigen::Index s : selection.chosen) {
        if (!report.mask(s, c)) coupling = std::max(coupling, report.j_x(s, c));
        if (!report.mask(c, s)) coupling = std::max(coupling, report.j_x(c, s));
      }
      candidates.push_back({{"candidate", report.variable_names[static_cast<std::size_t>(c)]},
                            {"coupling", coupling},
                            {"sensitivity", scores[c]}});
      const bool wins = best < 0 || coupling > best_coupling ||
                        (coupling == best_coupling && scores[c] > scores[best]) ||
                        (coupling == best_coupling && scores[c] == scores[best] && c < best);
      if (wins) {
        best = c;
        best_coupling = coupling;
      }
    }
    taken[static_cast<std::size_t>(best)] = 1;
    selection.chosen.push_back(best);
    selection.trace.push_back({{"event", "pick"},
                               {"variable", report.variable_names[static_cast<std::size_t>(best)]},
                               {"coupling", best_coupling},
                               {"sensitivity", scores[best]},
                               {"candidates", std::move(candidates)}});
  }
  return selection;
}

nlohmann::json subset_to_json(const SubsetSelection& selection) {
  return nlohmann::json{
      {"format", "couplekit-subset"},
      {"version", 1},
      {"chosen", selection.chosen_names()},
      {"k", selection.chosen.size()},
      {"mode", to_string(selection.mode)},
      {"variables", selection.variable_names},
      {"trace", selection.trace},
  };
}

void save_subset(const std::string& path, const SubsetSelection& selection) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write subset file '" + path + "'");
  out << subset_to_json(selection).dump(2) << "\n";
}

SubsetSelection load_subset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open subset file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("invalid JSON in subset file '" + path + "': " + e.what());
  }
  SubsetSelection selection;
  selection.variable_names = j.at("variables").get<std::vector<std::string>>();
  selection.mode = subset_mode_from_string(j.at("mode").get<std::string>());
  for (const auto& name : j.at("chosen")) {
    const std::string s = name.get<std::string>();
    bool found = false;
    for (std::size_t i = 0; i < selection.variable_names.size(); ++i) {
      if (selection.variable_names[i] == s) {
        selection.chosen.push_back(static_cast<Eigen::Index>(i));
        found = true;
        break;
      }
    }
    if (!found) throw IoError("subset references unknown variable '" + s + "'");
  }
  if (j.contains("trace")) selection.trace = j.at("trace");
  return selection;
}

}  // namespace couplekit::strategy
