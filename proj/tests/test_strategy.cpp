#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <set>

#include "couplekit/bench/analytic.hpp"
#include "couplekit/bench/synthetic_fowt.hpp"
#include "couplekit/core/errors.hpp"
#include "couplekit/strategy/compare.hpp"
#include "couplekit/strategy/sequence.hpp"
#include "couplekit/strategy/subset.hpp"

using namespace couplekit;
using strategy::SequencePlan;
using strategy::SubsetMode;

namespace {

dca::CouplingReport report_from_matrix(const Eigen::MatrixXd& jx,
                                       std::vector<std::string> names) {
  dca::CouplingReport report;
  const Eigen::Index n = jx.rows();
  report.variable_names = std::move(names);
  report.j_x = jx;
  report.j_psi = Eigen::MatrixXd::Zero(n, n);
  report.mask = Eigen::MatrixXi::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) report.mask(i, i) = 1;
  return report;
}

std::set<std::string> name_set(const std::vector<std::string>& names) {
  return {names.begin(), names.end()};
}

bench::AnalyticProblem chain_quadratic() {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3, 3);
  c(0, 1) = c(1, 0) = 1.0;
  c(1, 2) = c(2, 1) = 0.8;
  return bench::quadratic_general(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Zero(3), c,
                                  Eigen::VectorXd::Constant(3, -1.0),
                                  Eigen::VectorXd::Constant(3, 1.0),
                                  Eigen::VectorXd::Constant(3, 0.8), "chain");
}

using bench::AnalyticProblem;

}  // namespace

TEST_CASE("build_sequence groups mutual couplings and orders by influence") {
  Eigen::MatrixXd jx = Eigen::MatrixXd::Constant(3, 3, 0.05);
  jx.diagonal().setZero();
  jx(0, 2) = 0.9;  // x3 drives x1
  jx(1, 2) = 0.9;  // x3 drives x2
  jx(0, 1) = 0.8;  // x1 and x2 mutually strong
  jx(1, 0) = 0.8;
  const auto report = report_from_matrix(jx, {"x1", "x2", "x3"});

  const SequencePlan plan = strategy::build_sequence(report, 0.5, 0.25);
  REQUIRE(plan.stages.size() == 2);
  CHECK(plan.stage_names()[0] == std::vector<std::string>{"x3"});
  CHECK(name_set(plan.stage_names()[1]) == std::set<std::string>{"x1", "x2"});
}

TEST_CASE("no mutual couplings: singleton stages ordered by net influence then index") {
  SUBCASE("one dominant driver") {
    Eigen::MatrixXd jx = Eigen::MatrixXd::Constant(3, 3, 0.01);
    jx.diagonal().setZero();
    jx(0, 1) = 1.0;  // x2 drives x1, nothing is mutual
    const auto report = report_from_matrix(jx, {"x1", "x2", "x3"});
    const SequencePlan plan = strategy::build_sequence(report);
    REQUIRE(plan.stages.size() == 3);
    CHECK(plan.stage_names()[0] == std::vector<std::string>{"x2"});
    CHECK(plan.stage_names()[1] == std::vector<std::string>{"x3"});
    CHECK(plan.stage_names()[2] == std::vector<std::string>{"x1"});
  }

  SUBCASE("net-influence ties fall back to index order") {
    // Two equally strong independent drivers, no mutual coupling anywhere.
    Eigen::MatrixXd jx = Eigen::MatrixXd::Zero(4, 4);
    jx(0, 1) = 1.0;  // b drives a
    jx(2, 3) = 1.0;  // d drives c
    const auto report = report_from_matrix(jx, {"a", "b", "c", "d"});
    const SequencePlan plan = strategy::build_sequence(report);
    REQUIRE(plan.stages.size() == 4);
    CHECK(plan.stage_names()[0] == std::vector<std::string>{"b"});
    CHECK(plan.stage_names()[1] == std::vector<std::string>{"d"});
    CHECK(plan.stage_names()[2] == std::vector<std::string>{"a"});
    CHECK(plan.stage_names()[3] == std::vector<std::string>{"c"});
  }

  SUBCASE("a fully decoupled (all-zero) matrix gives singletons by index") {
    const auto report =
        report_from_matrix(Eigen::MatrixXd::Zero(3, 3), {"a", "b", "c"});
    const SequencePlan plan = strategy::build_sequence(report);
    REQUIRE(plan.stages.size() == 3);
    CHECK(plan.stage_names()[0] == std::vector<std::string>{"a"});
    CHECK(plan.stage_names()[1] == std::vector<std::string>{"b"});
    CHECK(plan.stage_names()[2] == std::vector<std::string>{"c"});
  }
}

TEST_CASE("reference platform pattern reproduces the expected stage structure") {
  const dca::CouplingReport report = bench::demo_coupling_report();
  const SequencePlan plan = strategy::build_sequence(report, 0.5, 0.25);

  REQUIRE(plan.stages.size() == 5);
  const auto stages = plan.stage_names();
  CHECK(stages[0] == std::vector<std::string>{"ps_pct"});
  CHECK(name_set(stages[1]) ==
        std::set<std::string>{"z_keel", "D_outer", "R_cs", "D_pnt_low"});
  CHECK(stages[2] == std::vector<std::string>{"D_main"});
  CHECK(stages[3] == std::vector<std::string>{"z_frbrd"});
  CHECK(stages[4] == std::vector<std::string>{"D_pnt_up"});

  SUBCASE("plan is invariant under variable relabeling") {
    const std::vector<Eigen::Index> order = {7, 2, 5, 0, 3, 1, 6, 4};
    dca::CouplingReport permuted;
    const Eigen::Index n = report.size();
    permuted.j_x.resize(n, n);
    permuted.j_psi.resize(n, n);
    permuted.mask.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      permuted.variable_names.push_back(
          report.variable_names[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
      for (Eigen::Index j = 0; j < n; ++j) {
        permuted.j_x(i, j) = report.j_x(order[static_cast<std::size_t>(i)],
                                        order[static_cast<std::size_t>(j)]);
        permuted.j_psi(i, j) = report.j_psi(order[static_cast<std::size_t>(i)],
                                            order[static_cast<std::size_t>(j)]);
        permuted.mask(i, j) = report.mask(order[static_cast<std::size_t>(i)],
                                          order[static_cast<std::size_t>(j)]);
      }
    }
    permuted.config = report.config;
    const SequencePlan plan2 = strategy::build_sequence(permuted, 0.5, 0.25);
    REQUIRE(plan2.stages.size() == plan.stages.size());
    for (std::size_t s = 0; s < plan.stages.size(); ++s) {
      CHECK(name_set(plan2.stage_names()[s]) == name_set(plan.stage_names()[s]));
    }
  }

  SUBCASE("grouping decisions in the trace replay against the report") {
    int checked = 0;
    for (const auto& event : plan.trace) {
      if (event.value("event", "") != "group_check" || !event.value("grouped", false)) continue;
      const Eigen::Index a = static_cast<Eigen::Index>(
          std::find(report.variable_names.begin(), report.variable_names.end(),
                    event.at("a").get<std::string>()) -
          report.variable_names.begin());
      const Eigen::Index b = static_cast<Eigen::Index>(
          std::find(report.variable_names.begin(), report.variable_names.end(),
                    event.at("b").get<std::string>()) -
          report.variable_names.begin());
      const double cut = event.at("cut").get<double>();
      CHECK(event.at("j_ab").get<double>() == report.j_x(a, b));
      CHECK(event.at("j_ba").get<double>() == report.j_x(b, a));
      CHECK(report.j_x(a, b) >= cut);
      CHECK(report.j_x(b, a) >= cut);
      ++checked;
    }
    CHECK(checked == 6);  // the six pairs inside the four-variable block
  }
}

TEST_CASE("build_sequence validation") {
  const dca::CouplingReport report = bench::demo_coupling_report();
  CHECK_THROWS_AS(strategy::build_sequence(report, 0.0, 0.25), ArgumentError);
  CHECK_THROWS_AS(strategy::build_sequence(report, 0.5, 1.5), ArgumentError);
  dca::CouplingReport empty;
  CHECK_THROWS_AS(strategy::build_sequence(empty), ArgumentError);
}

TEST_CASE("run_sequence") {
  SUBCASE("single all-variable stage equals plain multistart with the same seed") {
    const AnalyticProblem qp = chain_quadratic();
    const opt::ProblemDefinition problem = qp.to_problem();
    SequencePlan plan;
    plan.variable_names = problem.design_space().variable_names();
    plan.stages = {{0, 1, 2}};
    const auto run = strategy::run_sequence(problem, plan, 77);
    const auto direct =
        opt::minimize_multistart(opt::OptimizationSpec::full(problem), 10, 77);
    CHECK(run.final.x_model == direct.x_model);
    CHECK(run.final.objective_model == direct.objective_model);
  }

  SUBCASE("separable problem reaches the simultaneous optimum in any order") {
    const AnalyticProblem sp = bench::separable_quadratic(
        Eigen::VectorXd::Constant(3, 0.25), Eigen::VectorXd::Constant(3, -1.0),
        Eigen::VectorXd::Constant(3, 1.0), Eigen::VectorXd::Zero(3));
    const opt::ProblemDefinition problem = sp.to_problem();
    const double simultaneous =
        opt::minimize_multistart(opt::OptimizationSpec::full(problem), 10, 5).objective_model;

    for (const auto& stages : strategy::enumerate_ordered_partitions(3)) {
      SequencePlan plan;
      plan.variable_names = problem.design_space().variable_names();
      plan.stages = stages;
      const auto run = strategy::run_sequence(problem, plan, 5);
      REQUIRE(run.succeeded());
      CHECK(run.final.objective_model == doctest::Approx(simultaneous).epsilon(1e-6));
    }
  }

  SUBCASE("unstaged variables stay at nominal") {
    const AnalyticProblem qp = chain_quadratic();
    const opt::ProblemDefinition problem = qp.to_problem();
    SequencePlan plan;
    plan.variable_names = problem.design_space().variable_names();
    plan.stages = {{0}};
    const auto run = strategy::run_sequence(problem, plan, 3);
    CHECK(run.final.x_model[1] == 0.8);
    CHECK(run.final.x_model[2] == 0.8);
  }

  SUBCASE("stage validation") {
    const AnalyticProblem qp = chain_quadratic();
    const opt::ProblemDefinition problem = qp.to_problem();
    SequencePlan plan;
    plan.variable_names = problem.design_space().variable_names();
    plan.stages = {{0}, {0, 1}};
    CHECK_THROWS_AS(strategy::run_sequence(problem, plan, 1), ArgumentError);
  }
}

TEST_CASE("DCA-derived plan beats the worst ordering on a coupled chain") {
  const AnalyticProblem qp = chain_quadratic();
  const opt::ProblemDefinition problem = qp.to_problem();

  const dca::CouplingReport report = dca::coupling_matrices(problem, dca::SweepConfig{});
  const SequencePlan plan = strategy::build_sequence(report, 0.5, 0.25);
  // The chain couplings (0.5 and 0.4 against a 0.5 max) merge everything.
  REQUIRE(plan.stages.size() == 1);

  const double simultaneous =
      opt::minimize_multistart(opt::OptimizationSpec::full(problem), 10, 9).objective_model;
  const auto plan_run = strategy::run_sequence(problem, plan, 9);
  REQUIRE(plan_run.succeeded());
  const double plan_gap = plan_run.final.objective_model - simultaneous;

  double worst_gap = 0.0;
  for (const auto& stages : strategy::enumerate_ordered_partitions(3)) {
    SequencePlan candidate;
    candidate.variable_names = problem.design_space().variable_names();
    candidate.stages = stages;
    const auto run = strategy::run_sequence(problem, candidate, 9);
    REQUIRE(run.succeeded());
    const double gap = run.final.objective_model - simultaneous;
    CHECK(plan_gap <= gap + 1e-9);
    worst_gap = std::max(worst_gap, gap);
  }
  CHECK(plan_gap < worst_gap);
  CHECK(plan_gap <= 1e-6);
}

TEST_CASE("select_subset") {
  const dca::CouplingReport report = bench::demo_coupling_report();

  SUBCASE("k=1 picks the top objective-sensitivity variable in either mode") {
    for (auto mode : {SubsetMode::sensitivity_only, SubsetMode::coupling_aware}) {
      const auto sel = strategy::select_subset(report, 1, mode);
      CHECK(sel.chosen_names() == std::vector<std::string>{"D_pnt_low"});
    }
  }

  SUBCASE("k=2 sensitivity_only takes the two highest direct impacts") {
    const auto sel = strategy::select_subset(report, 2, SubsetMode::sensitivity_only);
    CHECK(name_set(sel.chosen_names()) == std::set<std::string>{"D_pnt_low", "z_keel"});
  }

  SUBCASE("k=2 coupling_aware pairs the seed with its strongest coupling") {
    const auto sel = strategy::select_subset(report, 2, SubsetMode::coupling_aware);
    CHECK(sel.chosen_names() == std::vector<std::string>{"D_pnt_low", "D_main"});
  }

  SUBCASE("k = N_x selects everything") {
    for (auto mode : {SubsetMode::sensitivity_only, SubsetMode::coupling_aware}) {
      const auto sel = strategy::select_subset(report, report.size(), mode);
      CHECK(sel.chosen.size() == static_cast<std::size_t>(report.size()));
    }
  }

  SUBCASE("coupling_aware selections are nested in k") {
    std::set<std::string> previous;
    for (Eigen::Index k = 1; k <= report.size(); ++k) {
      const auto sel = strategy::select_subset(report, k, SubsetMode::coupling_aware);
      const auto current = name_set(sel.chosen_names());
      for (const auto& name : previous) CHECK(current.count(name) == 1);
      previous = current;
    }
  }

  SUBCASE("k out of range") {
    CHECK_THROWS_AS(strategy::select_subset(report, 0, SubsetMode::sensitivity_only),
                    ArgumentError);
    CHECK_THROWS_AS(strategy::select_subset(report, 9, SubsetMode::sensitivity_only),
                    ArgumentError);
  }
}

TEST_CASE("random sequence drawing") {
  SUBCASE("unique and deterministic under seed") {
    const auto a = strategy::draw_random_sequences(5, 20, 11);
    const auto b = strategy::draw_random_sequences(5, 20, 11);
    REQUIRE(a.sequences.size() == 20);
    CHECK(a.sequences == b.sequences);
    std::set<std::string> keys;
    for (const auto& seq : a.sequences) {
      std::string key;
      for (const auto& stage : seq) {
        for (auto v : stage) key += std::to_string(v) + ",";
        key += ";";
      }
      CHECK(keys.insert(key).second);
    }
  }

  SUBCASE("eight-variable draws follow the 1-4-1-1-1 stage shape") {
    const auto draw = strategy::draw_random_sequences(8, 10, 3);
    for (const auto& seq : draw.sequences) {
      REQUIRE(seq.size() == 5);
      CHECK(seq[0].size() == 1);
      CHECK(seq[1].size() == 4);
      CHECK(seq[2].size() == 1);
      CHECK(seq[3].size() == 1);
      CHECK(seq[4].size() == 1);
    }
  }

  SUBCASE("requests beyond the distinct count are capped") {
    CHECK(strategy::distinct_sequence_count(3) == 13);
    CHECK(strategy::distinct_sequence_count(4) == 75);
    CHECK(strategy::distinct_sequence_count(8) == 1680);
    const auto draw = strategy::draw_random_sequences(3, 50, 1);
    CHECK(draw.capped);
    CHECK(draw.sequences.size() == 13);
  }

  SUBCASE("enumeration matches the counts") {
    CHECK(strategy::enumerate_ordered_partitions(3).size() == 13);
    CHECK(strategy::enumerate_ordered_partitions(4).size() == 75);
  }
}

TEST_CASE("compare_strategies") {
  SUBCASE("nothing but the defaults gives baseline + simultaneous") {
    const AnalyticProblem qp = chain_quadratic();
    const auto table = strategy::compare_strategies(qp.to_problem(), {}, {}, 0, 1);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].strategy == "baseline");
    CHECK(table.rows[1].strategy == "simultaneous");
    CHECK(!table.random_summary.has_value());
  }

  SUBCASE("separable problem: every strategy reaches the same objective") {
    const AnalyticProblem sp = bench::separable_quadratic(
        Eigen::VectorXd::Constant(3, 0.0), Eigen::VectorXd::Constant(3, -1.0),
        Eigen::VectorXd::Constant(3, 1.0), Eigen::VectorXd::Constant(3, 0.5));
    const opt::ProblemDefinition problem = sp.to_problem();
    SequencePlan plan;
    plan.variable_names = problem.design_space().variable_names();
    plan.stages = {{2}, {0}, {1}};
    const auto table = strategy::compare_strategies(problem, {plan}, {}, 6, 2);
    for (const auto& row : table.rows) {
      if (row.strategy == "baseline") continue;  // nominal is not the optimum
      CHECK(row.objective == doctest::Approx(0.0).epsilon(1e-6));
    }
  }

  SUBCASE("full enumeration: best random sequence ties the DCA plan") {
    const AnalyticProblem qp = chain_quadratic();
    const opt::ProblemDefinition problem = qp.to_problem();
    const dca::CouplingReport report = dca::coupling_matrices(problem, dca::SweepConfig{});
    const SequencePlan plan = strategy::build_sequence(report);
    const auto table = strategy::compare_strategies(problem, {plan}, {}, 13, 4);
    REQUIRE(table.random_summary.has_value());
    CHECK(table.random_summary->count == 13);

    double plan_objective = 0.0;
    for (const auto& row : table.rows) {
      if (row.strategy == "dca_sequence") plan_objective = row.objective;
    }
    CHECK(table.random_summary->min == doctest::Approx(plan_objective).epsilon(1e-5));
  }
}

TEST_CASE("plan and subset files round-trip") {
  const auto tmp = std::filesystem::temp_directory_path() /
                   ("couplekit_strategy_" + std::to_string(::getpid()));
  std::filesystem::create_directories(tmp);

  const dca::CouplingReport report = bench::demo_coupling_report();
  const SequencePlan plan = strategy::build_sequence(report);
  const std::string plan_path = (tmp / "plan.json").string();
  strategy::save_plan(plan_path, plan);
  const SequencePlan back = strategy::load_plan(plan_path);
  CHECK(back.stages == plan.stages);
  CHECK(back.variable_names == plan.variable_names);
  CHECK(back.tau_group == plan.tau_group);

  const auto sel = strategy::select_subset(report, 3, SubsetMode::coupling_aware);
  const std::string subset_path = (tmp / "subset.json").string();
  strategy::save_subset(subset_path, sel);
  const auto sel_back = strategy::load_subset(subset_path);
  CHECK(sel_back.chosen == sel.chosen);
  CHECK(sel_back.mode == sel.mode);

  std::filesystem::remove_all(tmp);
}
