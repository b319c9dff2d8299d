#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "couplekit/bench/analytic.hpp"
#include "couplekit/core/errors.hpp"
#include "couplekit/opt/solver.hpp"

using namespace couplekit;
using bench::AnalyticProblem;
using opt::OptimizationSpec;
using opt::SolveStatus;

namespace {

std::shared_ptr<const core::DesignSpace> interval(const std::string& name, double lo, double hi,
                                                  double nominal) {
  return std::make_shared<core::DesignSpace>(std::vector<core::DesignVariable>{
      {name, lo, hi, nominal, core::VariableRole::plant}});
}

}  // namespace

TEST_CASE("unconstrained convex minimum") {
  auto space = interval("x", -1.0, 1.0, 0.7);
  opt::ProblemDefinition problem;
  problem.space = space;
  problem.objective = "f";
  problem.surfaces.emplace("f", std::make_shared<opt::AnalyticSurface>(
                                    space, [](const Eigen::VectorXd& x) { return x[0] * x[0]; },
                                    [](const Eigen::VectorXd& x) {
                                      return Eigen::VectorXd::Constant(1, 2.0 * x[0]);
                                    }));

  const auto result = opt::minimize(OptimizationSpec::full(problem));
  CHECK(result.status == SolveStatus::converged);
  CHECK(std::abs(result.x_model[0]) <= 1e-6);
  CHECK(std::abs(result.objective_model) <= 1e-6);
  CHECK(result.feasible);
}

TEST_CASE("active inequality constraint: min x s.t. x >= 0.3") {
  auto space = interval("x", 0.0, 1.0, 0.9);
  opt::ProblemDefinition problem;
  problem.space = space;
  problem.objective = "f";
  problem.surfaces.emplace(
      "f", std::make_shared<opt::AnalyticSurface>(
               space, [](const Eigen::VectorXd& x) { return x[0]; },
               [](const Eigen::VectorXd&) { return Eigen::VectorXd::Constant(1, 1.0); }));
  problem.surfaces.emplace(
      "g", std::make_shared<opt::AnalyticSurface>(
               space, [](const Eigen::VectorXd& x) { return x[0]; },
               [](const Eigen::VectorXd&) { return Eigen::VectorXd::Constant(1, 1.0); }));
  problem.constraints.push_back(opt::Constraint{"g", 0.3, opt::ConstraintDirection::ge});

  const auto result = opt::minimize(OptimizationSpec::full(problem));
  CHECK(result.feasible);
  CHECK(result.x_model[0] == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("frozen variable changes the free optimum") {
  // f = x1^2 + x2^2 + x1 x2; with x2 frozen at 0.4 the optimum is x1 = -0.2.
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
  c(0, 1) = c(1, 0) = 1.0;
  const AnalyticProblem qp = bench::quadratic_coupled(
      2, c, Eigen::VectorXd::Constant(2, -1.0), Eigen::VectorXd::Constant(2, 1.0));
  const opt::ProblemDefinition problem = qp.to_problem();

  OptimizationSpec spec = OptimizationSpec::subset(problem, {0});
  spec.anchor_model[1] = 0.4;
  const auto result = opt::minimize(spec);
  CHECK(result.x_model[0] == doctest::Approx(-0.2).epsilon(1e-5));
  CHECK(result.x_model[1] == doctest::Approx(0.4));
}

TEST_CASE("projected gradient vanishes at interior optima") {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3, 3);
  c(0, 1) = c(1, 0) = 0.6;
  c(1, 2) = c(2, 1) = -0.4;
  const AnalyticProblem qp = bench::quadratic_coupled(
      3, c, Eigen::VectorXd::Constant(3, -2.0), Eigen::VectorXd::Constant(3, 2.0));
  const opt::ProblemDefinition problem = qp.to_problem();

  const auto result = opt::minimize(OptimizationSpec::full(problem));
  CHECK(result.status == SolveStatus::converged);
  const Eigen::VectorXd g = problem.surface("objective").gradient(result.u);
  CHECK(g.lpNorm<Eigen::Infinity>() <= 1e-5);
}

TEST_CASE("multistart behaviour") {
  SUBCASE("convex problem: any n_starts agrees with single start") {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
    c(0, 1) = c(1, 0) = 0.8;
    const AnalyticProblem qp = bench::quadratic_coupled(
        2, c, Eigen::VectorXd::Constant(2, -1.0), Eigen::VectorXd::Constant(2, 1.0));
    const opt::ProblemDefinition problem = qp.to_problem();
    const OptimizationSpec spec = OptimizationSpec::full(problem);
    const auto single = opt::minimize(spec);
    const auto multi = opt::minimize_multistart(spec, 6, 42);
    CHECK((multi.x_model - single.x_model).lpNorm<Eigen::Infinity>() <= 1e-6);
  }

  SUBCASE("n_starts = 1 is exactly the nominal start") {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
    const AnalyticProblem qp = bench::quadratic_coupled(
        2, c, Eigen::VectorXd::Constant(2, -1.0), Eigen::VectorXd::Constant(2, 1.0));
    const opt::ProblemDefinition problem = qp.to_problem();
    const OptimizationSpec spec = OptimizationSpec::full(problem);
    const auto a = opt::minimize_multistart(spec, 1, 7);
    const auto b = opt::minimize(spec);
    CHECK(a.x_model == b.x_model);
    CHECK(a.objective_model == b.objective_model);
  }

  SUBCASE("double well: multistart matches a dense grid oracle") {
    auto space = interval("x", -1.5, 1.5, 0.0);
    // f(x) = (x^2 - 1)^2 + 0.3 x has its global minimum near x = -1.04.
    const auto f = [](const Eigen::VectorXd& x) {
      const double q = x[0] * x[0] - 1.0;
      return q * q + 0.3 * x[0];
    };
    opt::ProblemDefinition problem;
    problem.space = space;
    problem.objective = "f";
    problem.surfaces.emplace("f", std::make_shared<opt::AnalyticSurface>(
                                      space, f,
                                      [](const Eigen::VectorXd& x) {
                                        return Eigen::VectorXd::Constant(
                                            1, 4.0 * x[0] * (x[0] * x[0] - 1.0) + 0.3);
                                      }));

    double best_x = 0.0, best_f = 1e300;
    for (int i = 0; i <= 10000; ++i) {
      Eigen::VectorXd x(1);
      x[0] = -1.5 + 3.0 * i / 10000.0;
      const double v = f(x);
      if (v < best_f) {
        best_f = v;
        best_x = x[0];
      }
    }

    const auto result = opt::minimize_multistart(OptimizationSpec::full(problem), 8, 3);
    CHECK(result.x_model[0] == doctest::Approx(best_x).epsilon(1e-3));
    CHECK(result.objective_model <= best_f + 1e-6);
  }

  SUBCASE("best objective is non-increasing in n_starts") {
    auto space = interval("x", -1.5, 1.5, 1.2);
    const auto f = [](const Eigen::VectorXd& x) {
      const double q = x[0] * x[0] - 1.0;
      return q * q + 0.3 * x[0];
    };
    opt::ProblemDefinition problem;
    problem.space = space;
    problem.objective = "f";
    problem.surfaces.emplace("f", std::make_shared<opt::AnalyticSurface>(space, f));
    const OptimizationSpec spec = OptimizationSpec::full(problem);
    double prev = 1e300;
    for (int n = 1; n <= 8; ++n) {
      const auto r = opt::minimize_multistart(spec, n, 11);
      CHECK(r.objective_model <= prev + 1e-12);
      prev = r.objective_model;
    }
  }
}

TEST_CASE("determinism: identical spec and seed give bit-identical results") {
  const AnalyticProblem qp = bench::subset_benchmark();
  const opt::ProblemDefinition problem = qp.to_problem();
  const OptimizationSpec spec = OptimizationSpec::full(problem);
  const auto a = opt::minimize_multistart(spec, 5, 99);
  const auto b = opt::minimize_multistart(spec, 5, 99);
  CHECK(a.x_model == b.x_model);
  CHECK(a.objective_model == b.objective_model);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("infeasible problems are reported, not fatal") {
  auto space = interval("x", 0.0, 1.0, 0.5);
  opt::ProblemDefinition problem;
  problem.space = space;
  problem.objective = "f";
  problem.surfaces.emplace("f", std::make_shared<opt::AnalyticSurface>(
                                    space, [](const Eigen::VectorXd& x) { return x[0]; }));
  problem.surfaces.emplace("g", std::make_shared<opt::AnalyticSurface>(
                                    space, [](const Eigen::VectorXd& x) { return x[0]; }));
  // x <= -0.5 is unreachable on [0, 1].
  problem.constraints.push_back(opt::Constraint{"g", -0.5, opt::ConstraintDirection::le});

  const auto result = opt::minimize(OptimizationSpec::full(problem));
  CHECK(result.status == SolveStatus::infeasible);
  CHECK(!result.feasible);
  CHECK(result.max_violation > 0.0);
  CHECK(result.x_model[0] <= 1e-5);  // least-violating point
}

TEST_CASE("spec validation errors") {
  const AnalyticProblem qp = bench::asymmetric_cubic();
  const opt::ProblemDefinition problem = qp.to_problem();

  OptimizationSpec spec = OptimizationSpec::full(problem);
  spec.free_variables.clear();
  CHECK_THROWS_AS(opt::minimize(spec), ArgumentError);

  OptimizationSpec dup = OptimizationSpec::full(problem);
  dup.free_variables = {0, 0};
  CHECK_THROWS_AS(opt::minimize(dup), ArgumentError);

  OptimizationSpec oob = OptimizationSpec::full(problem);
  oob.anchor_model[0] = 5.0;
  CHECK_THROWS_AS(opt::minimize(oob), BoundsError);
}

TEST_CASE("bounds are honored exactly") {
  // Linear pull toward the upper bound.
  auto space = interval("x", -2.0, 3.0, 0.0);
  opt::ProblemDefinition problem;
  problem.space = space;
  problem.objective = "f";
  problem.surfaces.emplace(
      "f", std::make_shared<opt::AnalyticSurface>(
               space, [](const Eigen::VectorXd& x) { return -x[0]; },
               [](const Eigen::VectorXd&) { return Eigen::VectorXd::Constant(1, -1.0); }));
  const auto result = opt::minimize(OptimizationSpec::full(problem));
  CHECK(result.x_model[0] == 3.0);
}
