#include "couplekit/strategy/sequence.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>

#include "couplekit/core/errors.hpp"

namespace couplekit::strategy {

namespace {

struct UnionFind {
  std::vector<Eigen::Index> parent;
  explicit UnionFind(Eigen::Index n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  }
  Eigen::Index find(Eigen::Index v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  }
  void unite(Eigen::Index a, Eigen::Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

}  // namespace

std::vector<std::vector<std::string>> SequencePlan::stage_names() const {
  std::vector<std::vector<std::string>> names;
  for (const auto& stage : stages) {
    std::vector<std::string> group;
    for (Eigen::Index i : stage) group.push_back(variable_names.at(static_cast<std::size_t>(i)));
    names.push_back(std::move(group));
  }
  return names;
}

SequencePlan build_sequence(const dca::CouplingReport& report, double tau_group,
                            double tau_influence) {
  const Eigen::Index n = report.size();
  if (n == 0) throw ArgumentError("build_sequence: empty coupling report");
  if (!(tau_group > 0.0 && tau_group <= 1.0) || !(tau_influence > 0.0 && tau_influence <= 1.0)) {
    throw ArgumentError("build_sequence: thresholds must lie in (0, 1]");
  }

  SequencePlan plan;
  plan.variable_names = report.variable_names;
  plan.tau_group = tau_group;
  plan.tau_influence = tau_influence;

  const double max_entry = report.max_unmasked_jx();
  // A zero matrix means nothing is coupled; no threshold can be met.
  const double infinity = std::numeric_limits<double>::infinity();
  const double group_cut = max_entry > 0.0 ? tau_group * max_entry : infinity;
  const double influence_cut = max_entry > 0.0 ? tau_influence * max_entry : infinity;
  plan.trace.push_back({{"event", "thresholds"},
                        {"max_jx", max_entry},
                        {"tau_group", tau_group},
                        {"tau_influence", tau_influence},
                        {"group_cut", group_cut},
                        {"influence_cut", influence_cut}});

  // Influence edges B -> A (entry (A,B) = effect of B on A's optimum).
  nlohmann::json edges = nlohmann::json::array();
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      if (a == b || report.mask(a, b)) continue;
      if (report.j_x(a, b) >= influence_cut) {
        edges.push_back({{"from", report.variable_names[static_cast<std::size_t>(b)]},
                         {"to", report.variable_names[static_cast<std::size_t>(a)]},
                         {"j_x", report.j_x(a, b)}});
      }
    }
  }
  plan.trace.push_back({{"event", "influence_edges"}, {"edges", std::move(edges)}});

  // Mutual strong pairs, merged transitively.
  UnionFind groups(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      if (report.mask(a, b) || report.mask(b, a)) continue;
      const double ab = report.j_x(a, b);
      const double ba = report.j_x(b, a);
      const bool grouped = ab >= group_cut && ba >= group_cut;
      if (grouped) groups.unite(a, b);
      if (grouped || std::max(ab, ba) >= group_cut) {
        plan.trace.push_back({{"event", "group_check"},
                              {"a", report.variable_names[static_cast<std::size_t>(a)]},
                              {"b", report.variable_names[static_cast<std::size_t>(b)]},
                              {"j_ab", ab},
                              {"j_ba", ba},
                              {"cut", group_cut},
                              {"grouped", grouped}});
      }
    }
  }

  std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(n));
  for (Eigen::Index v = 0; v < n; ++v) {
    members[static_cast<std::size_t>(groups.find(v))].push_back(v);
  }
  std::vector<std::vector<Eigen::Index>> stage_groups;
  for (auto& g : members) {
    if (!g.empty()) stage_groups.push_back(std::move(g));
  }

  // Net influence across group boundaries over raw unmasked entries:
  // out(G) = sum J_x(A, B in G) for A outside, in(G) = the transpose sum.
  std::vector<double> net(stage_groups.size(), 0.0);
  for (std::size_t gi = 0; gi < stage_groups.size(); ++gi) {
    const std::set<Eigen::Index> in_group(stage_groups[gi].begin(), stage_groups[gi].end());
    double out_sum = 0.0, in_sum = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        if (a == b || report.mask(a, b)) continue;
        const bool a_in = in_group.count(a) != 0;
        const bool b_in = in_group.count(b) != 0;
        if (!a_in && b_in) out_sum += report.j_x(a, b);
        if (a_in && !b_in) in_sum += report.j_x(a, b);
      }
    }
    net[gi] = out_sum - in_sum;
    nlohmann::json group_names = nlohmann::json::array();
    for (Eigen::Index v : stage_groups[gi]) {
      group_names.push_back(report.variable_names[static_cast<std::size_t>(v)]);
    }
    plan.trace.push_back({{"event", "net_influence"},
                          {"group", std::move(group_names)},
                          {"outgoing", out_sum},
                          {"incoming", in_sum},
                          {"net", net[gi]}});
  }

  std::vector<std::size_t> order(stage_groups.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (net[x] != net[y]) return net[x] > net[y];
    return stage_groups[x].front() < stage_groups[y].front();  // members are sorted
  });

  for (std::size_t gi : order) plan.stages.push_back(stage_groups[gi]);

  nlohmann::json order_names = nlohmann::json::array();
  for (const auto& stage : plan.stage_names()) order_names.push_back(stage);
  plan.trace.push_back({{"event", "final_order"}, {"stages", std::move(order_names)}});
  return plan;
}

nlohmann::json plan_to_json(const SequencePlan& plan) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& stage : plan.stage_names()) stages.push_back(stage);
  return nlohmann::json{
      {"format", "couplekit-plan"},
      {"version", 1},
      {"stages", std::move(stages)},
      {"thresholds", {{"tau_group", plan.tau_group}, {"tau_influence", plan.tau_influence}}},
      {"variables", plan.variable_names},
      {"trace", plan.trace},
  };
}

SequencePlan plan_from_json(const nlohmann::json& j, const dca::CouplingReport* report) {
  SequencePlan plan;
  if (j.contains("variables")) {
    plan.variable_names = j.at("variables").get<std::vector<std::string>>();
  } else if (report) {
    plan.variable_names = report->variable_names;
  } else {
    throw IoError("plan JSON lacks a variables list");
  }
  const auto index_of = [&](const std::string& name) -> Eigen::Index {
    for (std::size_t i = 0; i < plan.variable_names.size(); ++i) {
      if (plan.variable_names[i] == name) return static_cast<Eigen::Index>(i);
    }
    throw IoError("plan references unknown variable '" + name + "'");
  };
  for (const auto& stage : j.at("stages")) {
    std::vector<Eigen::Index> group;
    for (const auto& name : stage) group.push_back(index_of(name.get<std::string>()));
    plan.stages.push_back(std::move(group));
  }
  if (j.contains("thresholds")) {
    plan.tau_group = j.at("thresholds").value("tau_group", 0.5);
    plan.tau_influence = j.at("thresholds").value("tau_influence", 0.25);
  }
  if (j.contains("trace")) plan.trace = j.at("trace");
  return plan;
}

void save_plan(const std::string& path, const SequencePlan& plan) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write plan file '" + path + "'");
  out << plan_to_json(plan).dump(2) << "\n";
}

SequencePlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open plan file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("invalid JSON in plan file '" + path + "': " + e.what());
  }
  return plan_from_json(j);
}

SequenceRunResult run_sequence(const opt::ProblemDefinition& problem, const SequencePlan& plan,
                               std::uint64_t seed, const SequenceRunOptions& options) {
  problem.validate();
  const Eigen::Index n = problem.design_space().size();
  if (plan.stages.empty()) throw ArgumentError("run_sequence: plan has no stages");
  std::set<Eigen::Index> seen;
  for (const auto& stage : plan.stages) {
    if (stage.empty()) throw ArgumentError("run_sequence: empty stage");
    for (Eigen::Index v : stage) {
      if (v < 0 || v >= n) throw ArgumentError("run_sequence: stage variable out of range");
      if (!seen.insert(v).second) {
        throw ArgumentError("run_sequence: variable appears in two stages");
      }
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  SequenceRunResult run;
  Eigen::VectorXd current = problem.design_space().nominal_point();

  for (std::size_t s = 0; s < plan.stages.size(); ++s) {
    opt::OptimizationSpec spec = opt::OptimizationSpec::subset(problem, plan.stages[s]);
    spec.anchor_model = current;
    spec.tolerances = options.tolerances;
    opt::OptimizationResult result = opt::minimize_multistart(
        spec, options.n_starts, seed + static_cast<std::uint64_t>(s));
    run.stage_results.push_back(result);
    if (!result.feasible) {
      run.failed_stage = static_cast<int>(s);
      run.final = std::move(result);
      break;
    }
    current = result.x_model;
    if (s + 1 == plan.stages.size()) run.final = std::move(result);
  }

  run.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

}  // namespace couplekit::strategy
