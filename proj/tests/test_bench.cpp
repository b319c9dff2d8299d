#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "couplekit/bench/analytic.hpp"
#include "couplekit/bench/synthetic_fowt.hpp"
#include "couplekit/core/errors.hpp"
#include "couplekit/strategy/sequence.hpp"
#include "support/brute_force.hpp"

using namespace couplekit;
using bench::AnalyticProblem;

TEST_CASE("quadratic_coupled oracles") {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
  c(0, 1) = c(1, 0) = 1.0;
  const AnalyticProblem p = bench::quadratic_coupled(2, c, Eigen::VectorXd::Constant(2, -1.0),
                                                     Eigen::VectorXd::Constant(2, 1.0));

  SUBCASE("constant response slope -1/2") {
    for (double x2 : {-0.9, -0.3, 0.0, 0.4, 0.9}) {
      CHECK(p.response_slope(0, 1, x2) == -0.5);
      CHECK(p.optimal_response(0, 1, x2) == doctest::Approx(-x2 / 2.0));
    }
  }

  SUBCASE("known optimum evaluates to the known value") {
    REQUIRE(p.known_optimum.has_value());
    CHECK(std::abs(p.evaluate(*p.known_optimum) - *p.known_value) <= 1e-10);
  }

  SUBCASE("zero coupling means zero slopes") {
    const AnalyticProblem base = bench::quadratic_coupled(
        3, Eigen::MatrixXd::Zero(3, 3), Eigen::VectorXd::Constant(3, -1.0),
        Eigen::VectorXd::Constant(3, 1.0));
    for (Eigen::Index a = 0; a < 3; ++a) {
      for (Eigen::Index b = 0; b < 3; ++b) {
        if (a != b) CHECK(base.response_slope(a, b, 0.3) == 0.0);
      }
    }
  }

  SUBCASE("indefinite Hessian is rejected") {
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
    bad(0, 1) = bad(1, 0) = 3.0;
    CHECK_THROWS_AS(bench::quadratic_coupled(2, bad, Eigen::VectorXd::Constant(2, -1.0),
                                             Eigen::VectorXd::Constant(2, 1.0)),
                    ArgumentError);
  }

  SUBCASE("a strongly coupled pair is grouped by build_sequence") {
    Eigen::MatrixXd c3 = Eigen::MatrixXd::Zero(3, 3);
    c3(0, 1) = c3(1, 0) = 1.2;
    const AnalyticProblem p3 = bench::quadratic_coupled(
        3, c3, Eigen::VectorXd::Constant(3, -1.0), Eigen::VectorXd::Constant(3, 1.0));
    const auto report = dca::coupling_matrices(p3.to_problem(), dca::SweepConfig{});
    const auto plan = strategy::build_sequence(report);
    bool found_pair = false;
    for (const auto& stage : plan.stages) {
      if (stage.size() == 2) {
        CHECK(stage == std::vector<Eigen::Index>{0, 1});
        found_pair = true;
      } else {
        CHECK(stage.size() == 1);
      }
    }
    CHECK(found_pair);
  }
}

TEST_CASE("oracle responses match dense-grid brute force within 1e-4") {
  const AnalyticProblem problems[] = {
      [] {
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
        c(0, 1) = c(1, 0) = 1.0;
        return bench::quadratic_coupled(2, c, Eigen::VectorXd::Constant(2, -1.0),
                                        Eigen::VectorXd::Constant(2, 1.0));
      }(),
      bench::subset_benchmark(),
  };

  for (const AnalyticProblem& p : problems) {
    const Eigen::Index n = p.space->size();
    const Eigen::VectorXd nominal = p.space->nominal_point();
    for (Eigen::Index a = 0; a < std::min<Eigen::Index>(n, 3); ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        if (a == b) continue;
        for (double t : {0.12, 0.5, 0.84}) {
          const double lo_b = p.space->variable(b).lower;
          const double hi_b = p.space->variable(b).upper;
          const double x_b = lo_b + t * (hi_b - lo_b);
          const auto objective_1d = [&](double x_a) {
            Eigen::VectorXd x = nominal;
            x[b] = x_b;
            x[a] = x_a;
            return p.evaluate(x);
          };
          const double brute = testsupport::brute_force_argmin(
              objective_1d, p.space->variable(a).lower, p.space->variable(a).upper);
          CHECK(std::abs(p.optimal_response(a, b, x_b) - brute) <= 1e-4);
        }
      }
    }
  }
}

TEST_CASE("subset benchmark shape") {
  const AnalyticProblem p = bench::subset_benchmark();
  CHECK(p.space->size() == 5);
  CHECK(p.is_quadratic);
  // The interacting block pays off beyond the bare x0 solve.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(5);
  x[0] = 1.0;
  const double solo = p.evaluate(x);
  x[1] = x[2] = 0.4737;
  CHECK(p.evaluate(x) < solo);
}

TEST_CASE("synthetic platform dataset") {
  const auto space = bench::platform_space();
  CHECK(space->size() == 8);

  const auto& dpl = space->variable(space->index_of("D_pnt_low"));
  CHECK(dpl.lower == 6.6148);
  CHECK(dpl.upper == 13.6148);
  CHECK(dpl.nominal == 9.6148);
  CHECK(space->variable(space->index_of("ps_pct")).role == core::VariableRole::control);
  CHECK(space->fixed_parameters().size() == 6);

  CHECK(bench::kPitchLimitDeg == 6.9);
  CHECK(bench::kNacelleAccelLimit == 0.7);

  SUBCASE("regeneration under a fixed seed is bit-identical") {
    const core::Dataset a = bench::synthetic_fowt(60, 42);
    const core::Dataset b = bench::synthetic_fowt(60, 42);
    CHECK(a.inputs == b.inputs);
    CHECK(a.outputs == b.outputs);
    CHECK(a.rows() == 60);
    CHECK(a.output_names ==
          std::vector<std::string>{"m_ptfm", "max_theta_ptfm", "max_a_nac"});
  }

  SUBCASE("nominal design is feasible for the synthetic problem") {
    const opt::ProblemDefinition problem = bench::synthetic_problem();
    const Eigen::VectorXd u = space->normalize(space->nominal_point());
    CHECK(problem.surface("max_theta_ptfm").value_model(u) <= bench::kPitchLimitDeg);
    CHECK(problem.surface("max_a_nac").value_model(u) <= bench::kNacelleAccelLimit);
  }

  SUBCASE("full optimization of the synthetic problem succeeds and binds a constraint") {
    const opt::ProblemDefinition problem = bench::synthetic_problem();
    const auto result =
        opt::minimize_multistart(opt::OptimizationSpec::full(problem), 6, 7);
    REQUIRE(result.feasible);
    const Eigen::VectorXd u = result.u;
    const double theta = problem.surface("max_theta_ptfm").value_model(u);
    const double accel = problem.surface("max_a_nac").value_model(u);
    const double slack =
        std::min(bench::kPitchLimitDeg - theta, bench::kNacelleAccelLimit - accel);
    CHECK(slack >= -1e-6);
    CHECK(slack <= 0.05);  // mass minimization pushes into a constraint
    CHECK(result.objective_model <
          problem.surface("m_ptfm").value_model(space->normalize(space->nominal_point())));
  }
}
