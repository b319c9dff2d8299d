#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "couplekit/dca/sweep.hpp"

namespace couplekit::strategy {

/// Ordered stages of variable groups for sequential decomposition, plus a
/// replayable trace of every threshold comparison that produced them.
struct SequencePlan {
  std::vector<std::vector<Eigen::Index>> stages;
  std::vector<std::string> variable_names;
  double tau_group = 0.5;
  double tau_influence = 0.25;
  nlohmann::json trace = nlohmann::json::array();

  std::vector<std::vector<std::string>> stage_names() const;
};

/// Builds the decomposition plan from the design coupling matrix:
///   1. influence edges B -> A where J_x(A,B) >= tau_influence * max(J_x);
///   2. groups = transitive closure of pairs coupled both ways at
///      >= tau_group * max(J_x);
///   3. groups ordered by descending net influence (outgoing minus incoming
///      cross-boundary entries), ties by the smallest member index.
/// Thresholds are relative, in (0, 1].
SequencePlan build_sequence(const dca::CouplingReport& report, double tau_group = 0.5,
                            double tau_influence = 0.25);

nlohmann::json plan_to_json(const SequencePlan& plan);
SequencePlan plan_from_json(const nlohmann::json& j, const dca::CouplingReport* report = nullptr);
void save_plan(const std::string& path, const SequencePlan& plan);
SequencePlan load_plan(const std::string& path);

struct SequenceRunResult {
  std::vector<opt::OptimizationResult> stage_results;
  opt::OptimizationResult final;
  int failed_stage = -1;  // index of the first infeasible stage, -1 if none
  double wall_seconds = 0.0;

  bool succeeded() const { return failed_stage < 0; }
};

struct SequenceRunOptions {
  int n_starts = 10;
  opt::SolverTolerances tolerances;
};

/// Runs the staged optimization: stage s frees exactly its group, with
/// earlier stages frozen at their optima and later (or never-staged)
/// variables at nominal. Stage s uses seed + s so a single all-variable
/// stage is identical to a plain multistart solve with the same seed.
SequenceRunResult run_sequence(const opt::ProblemDefinition& problem, const SequencePlan& plan,
                               std::uint64_t seed, const SequenceRunOptions& options = {});

}  // namespace couplekit::strategy
