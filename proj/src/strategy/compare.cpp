#include "couplekit/strategy/compare.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "couplekit/core/dataset.hpp"
#include "couplekit/core/errors.hpp"
#include "couplekit/core/parallel.hpp"
#include "couplekit/core/rng.hpp"

namespace couplekit::strategy {

namespace {

void enumerate_recursive(std::vector<Eigen::Index>& remaining, StageList& prefix,
                         std::vector<StageList>& out) {
  if (remaining.empty()) {
    out.push_back(prefix);
    return;
  }
  const std::size_t m = remaining.size();
  // Every non-empty subset of the remaining set can be the next stage; the
  // stage order makes each ordered partition reachable exactly once.
  const std::uint64_t total = 1ull << m;
  for (std::uint64_t bits = 1; bits < total; ++bits) {
    std::vector<Eigen::Index> stage;
    std::vector<Eigen::Index> rest;
    for (std::size_t i = 0; i < m; ++i) {
      if (bits & (1ull << i)) {
        stage.push_back(remaining[i]);
      } else {
        rest.push_back(remaining[i]);
      }
    }
    prefix.push_back(stage);
    enumerate_recursive(rest, prefix, out);
    prefix.pop_back();
  }
}

std::string canonical_key(const StageList& stages) {
  std::ostringstream key;
  for (const auto& stage : stages) {
    std::vector<Eigen::Index> sorted = stage;
    std::sort(sorted.begin(), sorted.end());
    for (Eigen::Index v : sorted) key << v << ",";
    key << ";";
  }
  return key.str();
}

std::string stages_detail(const StageList& stages, const std::vector<std::string>& names) {
  std::ostringstream text;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    if (s) text << " -> ";
    text << "[";
    for (std::size_t i = 0; i < stages[s].size(); ++i) {
      if (i) text << " ";
      text << names.at(static_cast<std::size_t>(stages[s][i]));
    }
    text << "]";
  }
  return text.str();
}

// The paper's stage-shape rule for eight variables: one variable first,
// four together, then three single-variable stages.
const std::vector<Eigen::Index> kEightShape = {1, 4, 1, 1, 1};

StageList random_sequence(Eigen::Index n, core::Rng& rng) {
  std::vector<Eigen::Index> shape;
  if (n == 8) {
    shape = kEightShape;
  } else {
    // Uniform over compositions of n: each of the n-1 gaps independently
    // splits a new stage.
    shape.clear();
    Eigen::Index run = 1;
    for (Eigen::Index i = 1; i < n; ++i) {
      if (rng.below(2) == 1) {
        shape.push_back(run);
        run = 1;
      } else {
        ++run;
      }
    }
    shape.push_back(run);
  }

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  rng.shuffle(perm);

  StageList stages;
  std::size_t cursor = 0;
  for (Eigen::Index size : shape) {
    std::vector<Eigen::Index> stage(perm.begin() + static_cast<long>(cursor),
                                    perm.begin() + static_cast<long>(cursor + size));
    std::sort(stage.begin(), stage.end());
    stages.push_back(std::move(stage));
    cursor += static_cast<std::size_t>(size);
  }
  return stages;
}

}  // namespace

std::vector<StageList> enumerate_ordered_partitions(Eigen::Index n) {
  if (n < 1 || n > 10) {
    throw ArgumentError("enumerate_ordered_partitions supports 1 <= n <= 10");
  }
  std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  std::vector<StageList> out;
  StageList prefix;
  enumerate_recursive(all, prefix, out);
  return out;
}

std::uint64_t distinct_sequence_count(Eigen::Index n) {
  if (n == 8) {
    return 1680;  // 8! / 4! orderings of the fixed (1,4,1,1,1) shape
  }
  // Ordered Bell numbers a(n) = sum_k C(n,k) a(n-k).
  std::vector<std::uint64_t> fubini(static_cast<std::size_t>(n) + 1, 0);
  fubini[0] = 1;
  for (Eigen::Index m = 1; m <= n; ++m) {
    std::uint64_t total = 0;
    std::uint64_t binom = 1;  // C(m, k) built incrementally
    for (Eigen::Index k = 1; k <= m; ++k) {
      binom = binom * static_cast<std::uint64_t>(m - k + 1) / static_cast<std::uint64_t>(k);
      total += binom * fubini[static_cast<std::size_t>(m - k)];
    }
    fubini[static_cast<std::size_t>(m)] = total;
  }
  return fubini[static_cast<std::size_t>(n)];
}

RandomSequenceDraw draw_random_sequences(Eigen::Index n_vars, std::uint64_t count,
                                         std::uint64_t seed) {
  if (n_vars < 1) throw ArgumentError("draw_random_sequences: need at least one variable");
  RandomSequenceDraw draw;
  const std::uint64_t distinct = distinct_sequence_count(n_vars);
  std::uint64_t target = count;
  if (target > distinct) {
    target = distinct;
    draw.capped = true;
  }

  core::Rng rng(core::derive_seed(seed, 0xc0457u));
  std::set<std::string> seen;
  std::uint64_t attempts = 0;
  const std::uint64_t max_attempts = 1000 * target + 100000;
  while (draw.sequences.size() < target && attempts < max_attempts) {
    ++attempts;
    StageList candidate = random_sequence(n_vars, rng);
    if (seen.insert(canonical_key(candidate)).second) {
      draw.sequences.push_back(std::move(candidate));
    }
  }
  return draw;
}

ComparisonTable compare_strategies(const opt::ProblemDefinition& problem,
                                   const std::vector<SequencePlan>& plans,
                                   const std::vector<SubsetSelection>& subsets,
                                   std::uint64_t n_random_sequences, std::uint64_t seed,
                                   const CompareOptions& options) {
  problem.validate();
  const core::DesignSpace& space = problem.design_space();
  const std::vector<std::string> names = space.variable_names();
  ComparisonTable table;

  // Work items are prepared up front and solved slot-parallel.
  struct Job {
    std::string strategy;
    std::string detail;
    enum class Kind { baseline, simultaneous, sequence, subset } kind;
    StageList stages;               // sequence jobs
    std::vector<Eigen::Index> free; // subset jobs
    std::uint64_t seed = 0;
  };
  std::vector<Job> jobs;

  jobs.push_back({"baseline", "all variables at nominal", Job::Kind::baseline, {}, {}, 0});
  {
    std::vector<Eigen::Index> all(static_cast<std::size_t>(space.size()));
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    jobs.push_back({"simultaneous", "all variables, one stage", Job::Kind::simultaneous, {}, all,
                    seed});
  }
  for (std::size_t p = 0; p < plans.size(); ++p) {
    Job job;
    job.strategy = plans.size() == 1 ? "dca_sequence" : "dca_sequence_" + std::to_string(p + 1);
    job.kind = Job::Kind::sequence;
    job.stages = plans[p].stages;
    job.detail = stages_detail(job.stages, names);
    job.seed = core::derive_seed(seed, 0x9a1 + p);
    jobs.push_back(std::move(job));
  }
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    Job job;
    job.strategy = "subset_" + to_string(subsets[s].mode);
    if (subsets.size() > 1) job.strategy += "_" + std::to_string(s + 1);
    job.kind = Job::Kind::subset;
    job.free = subsets[s].chosen;
    StageList one_stage{subsets[s].chosen};
    job.detail = stages_detail(one_stage, names);
    job.seed = core::derive_seed(seed, 0xb51 + s);
    jobs.push_back(std::move(job));
  }

  const RandomSequenceDraw draw =
      draw_random_sequences(space.size(), n_random_sequences, seed);
  table.random_capped = draw.capped;
  std::vector<std::size_t> random_rows;
  for (std::size_t r = 0; r < draw.sequences.size(); ++r) {
    Job job;
    job.strategy = "random_sequence_" + std::to_string(r + 1);
    job.kind = Job::Kind::sequence;
    job.stages = draw.sequences[r];
    job.detail = stages_detail(job.stages, names);
    job.seed = core::derive_seed(seed, 0xd00d + r);
    random_rows.push_back(jobs.size());
    jobs.push_back(std::move(job));
  }

  table.rows.resize(jobs.size());
  core::parallel_for(
      jobs.size(),
      [&](std::size_t k) {
        const Job& job = jobs[k];
        ComparisonRow row;
        row.strategy = job.strategy;
        row.detail = job.detail;
        const auto t0 = std::chrono::steady_clock::now();
        switch (job.kind) {
          case Job::Kind::baseline: {
            const Eigen::VectorXd u = space.normalize(space.nominal_point());
            const opt::ResponseSurface& obj = problem.surface(problem.objective);
            row.objective = obj.value_model(u);
            row.feasible = true;
            for (const auto& c : problem.constraints) {
              const opt::ResponseSurface& s = problem.surface(c.channel);
              const double value = s.value_model(u);
              const bool ok = c.direction == opt::ConstraintDirection::le ? value <= c.limit + 1e-9
                                                                          : value >= c.limit - 1e-9;
              row.feasible = row.feasible && ok;
            }
            break;
          }
          case Job::Kind::simultaneous:
          case Job::Kind::subset: {
            opt::OptimizationSpec spec = opt::OptimizationSpec::subset(problem, job.free);
            spec.tolerances = options.tolerances;
            const opt::OptimizationResult result =
                opt::minimize_multistart(spec, options.n_starts, job.seed);
            row.objective = result.objective_model;
            row.feasible = result.feasible;
            break;
          }
          case Job::Kind::sequence: {
            SequencePlan plan;
            plan.stages = job.stages;
            plan.variable_names = names;
            SequenceRunOptions run_options;
            run_options.n_starts = options.n_starts;
            run_options.tolerances = options.tolerances;
            const SequenceRunResult run = run_sequence(problem, plan, job.seed, run_options);
            row.objective = run.final.objective_model;
            row.feasible = run.succeeded();
            break;
          }
        }
        row.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        table.rows[k] = std::move(row);
      },
      options.workers);

  if (!random_rows.empty()) {
    std::vector<double> values;
    for (std::size_t k : random_rows) values.push_back(table.rows[k].objective);
    std::sort(values.begin(), values.end());
    RandomSummary summary;
    summary.count = values.size();
    summary.min = values.front();
    summary.max = values.back();
    summary.mean = std::accumulate(values.begin(), values.end(), 0.0) /
                   static_cast<double>(values.size());
    const std::size_t mid = values.size() / 2;
    summary.median = values.size() % 2 == 1 ? values[mid]
                                            : 0.5 * (values[mid - 1] + values[mid]);
    table.random_summary = summary;
  }
  return table;
}

void write_comparison_csv(const std::string& path, const ComparisonTable& table) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write comparison file '" + path + "'");
  out << "strategy,objective,wall_seconds,feasible,detail\n";
  const auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += "\"\"";
      else quoted.push_back(c);
    }
    return quoted + "\"";
  };
  for (const auto& row : table.rows) {
    out << quote(row.strategy) << "," << core::format_double(row.objective) << ","
        << core::format_double(row.wall_seconds) << "," << (row.feasible ? "true" : "false")
        << "," << quote(row.detail) << "\n";
  }
  if (table.random_summary) {
    const RandomSummary& s = *table.random_summary;
    out << "random_mean," << core::format_double(s.mean) << ",,,over " << s.count
        << " unique random sequences\n";
    out << "random_median," << core::format_double(s.median) << ",,,\n";
    out << "random_min," << core::format_double(s.min) << ",,,\n";
    out << "random_max," << core::format_double(s.max) << ",,,\n";
  }
}

}  // namespace couplekit::strategy
