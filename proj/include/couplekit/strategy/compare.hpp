#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "couplekit/strategy/sequence.hpp"
#include "couplekit/strategy/subset.hpp"

namespace couplekit::strategy {

using StageList = std::vector<std::vector<Eigen::Index>>;

/// All ordered set partitions of {0..n-1} (stages of unordered groups).
/// Grows as the Fubini numbers; intended for n <= 8.
std::vector<StageList> enumerate_ordered_partitions(Eigen::Index n);

/// Number of distinct random sequences available under the shape rule:
/// n == 8 uses the fixed (1,4,1,1,1) stage shape; any other n draws over
/// all ordered set partitions.
std::uint64_t distinct_sequence_count(Eigen::Index n);

/// Unique random stage lists, deterministic under the seed; capped (with a
/// flag) when more sequences are requested than exist.
struct RandomSequenceDraw {
  std::vector<StageList> sequences;
  bool capped = false;
};
RandomSequenceDraw draw_random_sequences(Eigen::Index n_vars, std::uint64_t count,
                                         std::uint64_t seed);

struct ComparisonRow {
  std::string strategy;
  double objective = 0.0;  // model units
  double wall_seconds = 0.0;
  bool feasible = false;
  std::string detail;  // stage/subset structure
};

struct RandomSummary {
  std::uint64_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  std::optional<RandomSummary> random_summary;
  bool random_capped = false;
};

struct CompareOptions {
  int n_starts = 10;
  int workers = 0;
  opt::SolverTolerances tolerances;
};

/// Runs every strategy on the same problem: the all-nominal baseline and
/// the full simultaneous solve always; then one row per plan, per subset,
/// and per unique random sequence (paper-shaped stage sizes), with summary
/// statistics over the random rows.
ComparisonTable compare_strategies(const opt::ProblemDefinition& problem,
                                   const std::vector<SequencePlan>& plans,
                                   const std::vector<SubsetSelection>& subsets,
                                   std::uint64_t n_random_sequences, std::uint64_t seed,
                                   const CompareOptions& options = {});

void write_comparison_csv(const std::string& path, const ComparisonTable& table);

}  // namespace couplekit::strategy
