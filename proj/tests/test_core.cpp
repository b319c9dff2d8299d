#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "couplekit/core/dataset.hpp"
#include "couplekit/core/design_space.hpp"
#include "couplekit/core/errors.hpp"
#include "couplekit/core/minimize.hpp"
#include "couplekit/core/rng.hpp"
#include "couplekit/core/sampling.hpp"

using namespace couplekit;
using core::DesignSpace;
using core::DesignVariable;
using core::VariableRole;

namespace {

DesignSpace one_var(const std::string& name, double lo, double hi, double nominal) {
  return DesignSpace({DesignVariable{name, lo, hi, nominal, VariableRole::plant}});
}

// The eight-variable platform space used in the docs and demos.
DesignSpace demo_space() {
  return DesignSpace({
      {"D_main", 6.0, 14.0, 10.0, VariableRole::plant},
      {"D_pnt_up", 0.71, 1.11, 0.91, VariableRole::plant},
      {"D_pnt_low", 6.6148, 13.6148, 9.6148, VariableRole::plant},
      {"D_outer", 10.5, 14.5, 12.5, VariableRole::plant},
      {"R_cs", 41.57, 61.57, 51.75, VariableRole::plant},
      {"z_keel", -24.0, -16.0, -20.0, VariableRole::plant},
      {"z_frbrd", 7.0, 21.0, 15.0, VariableRole::plant},
      {"ps_pct", 0.75, 1.0, 0.85, VariableRole::control},
  });
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("couplekit_core_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("design space validation") {
  CHECK_THROWS_AS(one_var("x", 1.0, 1.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(one_var("x", 0.0, 1.0, 2.0), ArgumentError);
  CHECK_THROWS_AS(DesignSpace({DesignVariable{"x", 0, 1, 0.5, VariableRole::plant},
                               DesignVariable{"x", 0, 1, 0.5, VariableRole::plant}}),
                  ArgumentError);
}

TEST_CASE("normalize maps bounds to the unit box") {
  const DesignSpace space = demo_space();

  Eigen::VectorXd x = space.nominal_point();
  x[space.index_of("D_main")] = 10.0;
  const Eigen::VectorXd u = space.normalize(x);
  CHECK(u[space.index_of("D_main")] == doctest::Approx(0.5).epsilon(1e-14));

  CHECK(space.normalize(space.lower_bounds()).isZero(0.0));
  CHECK(space.normalize(space.upper_bounds()).isApprox(
      Eigen::VectorXd::Ones(space.size()), 1e-15));

  // (0.9375 - 0.75) / 0.25 = 0.75
  x = space.nominal_point();
  x[space.index_of("ps_pct")] = 0.9375;
  CHECK(space.normalize(x)[space.index_of("ps_pct")] == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("normalize rejects out-of-bounds values naming the variable") {
  const DesignSpace space = demo_space();
  Eigen::VectorXd x = space.nominal_point();
  x[space.index_of("z_keel")] = -30.0;
  try {
    space.normalize(x);
    FAIL("expected BoundsError");
  } catch (const BoundsError& e) {
    CHECK(std::string(e.what()).find("z_keel") != std::string::npos);
  }
}

TEST_CASE("denormalize inverts normalize") {
  const DesignSpace space = demo_space();
  CHECK(space.denormalize(Eigen::VectorXd::Zero(space.size())).isApprox(space.lower_bounds()));
  CHECK(space.denormalize(Eigen::VectorXd::Ones(space.size())).isApprox(space.upper_bounds()));

  Eigen::VectorXd u = space.normalize(space.nominal_point());
  u[space.index_of("z_keel")] = 0.5;
  CHECK(space.denormalize(u)[space.index_of("z_keel")] == doctest::Approx(-20.0).epsilon(1e-14));

  Eigen::VectorXd bad = Eigen::VectorXd::Constant(space.size(), 0.5);
  bad[0] = 1.5;
  CHECK_THROWS_AS(space.denormalize(bad), DomainError);
}

TEST_CASE("round trips hold to 1e-12 on random points") {
  const DesignSpace space = demo_space();
  core::Rng rng(7);
  for (int k = 0; k < 200; ++k) {
    Eigen::VectorXd u(space.size());
    for (Eigen::Index i = 0; i < space.size(); ++i) u[i] = rng.uniform01();
    const Eigen::VectorXd x = space.denormalize(u);
    CHECK((space.normalize(x) - u).lpNorm<Eigen::Infinity>() <= 1e-12);
    const Eigen::VectorXd x2 = space.denormalize(space.normalize(x));
    for (Eigen::Index i = 0; i < space.size(); ++i) {
      CHECK(std::abs(x2[i] - x[i]) <= 1e-12 * std::max(1.0, std::abs(x[i])));
    }
  }
}

TEST_CASE("affine re-unitting leaves normalized values unchanged") {
  const DesignSpace space = one_var("len", 2.0, 8.0, 5.0);
  const double alpha = 1000.0;  // metres -> millimetres
  const double beta = -4.0;
  const DesignSpace rescaled =
      one_var("len", alpha * 2.0 + beta, alpha * 8.0 + beta, alpha * 5.0 + beta);

  core::Rng rng(11);
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd x(1);
    x[0] = rng.uniform(2.0, 8.0);
    Eigen::VectorXd x_scaled(1);
    x_scaled[0] = alpha * x[0] + beta;
    const double u = space.normalize(x)[0];
    const double u_scaled = rescaled.normalize(x_scaled)[0];
    CHECK(std::abs(u - u_scaled) <= 1e-12);
  }
}

TEST_CASE("latin hypercube stratifies every dimension") {
  SUBCASE("n=4 in 1-D") {
    const DesignSpace space = one_var("x", 0.0, 1.0, 0.5);
    const Eigen::MatrixXd s = core::latin_hypercube(space, 4, 123);
    REQUIRE(s.rows() == 4);
    std::vector<int> histogram(4, 0);
    for (Eigen::Index i = 0; i < 4; ++i) {
      const int stratum = std::min(3, static_cast<int>(s(i, 0) * 4.0));
      histogram[static_cast<std::size_t>(stratum)]++;
    }
    for (int count : histogram) CHECK(count == 1);
  }

  SUBCASE("n=750 on the 8-variable space") {
    const DesignSpace space = demo_space();
    const Eigen::MatrixXd s = core::latin_hypercube(space, 750, 99);
    REQUIRE(s.rows() == 750);
    REQUIRE(s.cols() == 8);
    for (Eigen::Index d = 0; d < 8; ++d) {
      const double lo = space.variable(d).lower;
      const double span = space.variable(d).upper - lo;
      std::vector<int> histogram(750, 0);
      for (Eigen::Index i = 0; i < 750; ++i) {
        const double u = (s(i, d) - lo) / span;
        const int stratum = std::min(749, static_cast<int>(u * 750.0));
        histogram[static_cast<std::size_t>(stratum)]++;
      }
      for (int count : histogram) CHECK(count == 1);
    }
  }

  SUBCASE("deterministic under seed") {
    const DesignSpace space = demo_space();
    const Eigen::MatrixXd a = core::latin_hypercube(space, 40, 5);
    const Eigen::MatrixXd b = core::latin_hypercube(space, 40, 5);
    CHECK(a == b);
    const Eigen::MatrixXd c = core::latin_hypercube(space, 40, 6);
    CHECK(a != c);
  }

  SUBCASE("n < 2 rejected") {
    const DesignSpace space = one_var("x", 0.0, 1.0, 0.5);
    CHECK_THROWS_AS(core::latin_hypercube(space, 1, 1), ArgumentError);
  }
}

TEST_CASE("standardize_outputs z-scores each column") {
  core::Dataset ds;
  ds.inputs = Eigen::MatrixXd::Zero(3, 1);
  ds.input_names = {"x"};
  ds.outputs.resize(3, 1);
  ds.outputs << 1.0, 2.0, 3.0;
  ds.output_names = {"y"};

  const auto [std_ds, stats] = core::standardize_outputs(ds);
  CHECK(stats[0].mean == doctest::Approx(2.0));
  CHECK(stats[0].stddev == doctest::Approx(1.0));
  CHECK(std::abs(std_ds.outputs.col(0).mean()) <= 1e-10);
  const double var = (std_ds.outputs.col(0).array() - std_ds.outputs.col(0).mean())
                         .square()
                         .sum() / 2.0;
  CHECK(std::abs(std::sqrt(var) - 1.0) <= 1e-10);

  SUBCASE("idempotent on standardized data") {
    const auto [again, stats2] = core::standardize_outputs(std_ds);
    CHECK((again.outputs - std_ds.outputs).lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK(std::abs(stats2[0].mean) <= 1e-10);
    CHECK(stats2[0].stddev == doctest::Approx(1.0).epsilon(1e-10));
  }

  SUBCASE("constant column is rejected by name") {
    ds.outputs << 10.0, 10.0, 10.0;
    try {
      core::standardize_outputs(ds);
      FAIL("expected DegenerateChannelError");
    } catch (const DegenerateChannelError& e) {
      CHECK(std::string(e.what()).find("y") != std::string::npos);
    }
  }
}

TEST_CASE("dataset CSV round trip and non-finite row rejection") {
  TempDir tmp;
  const DesignSpace space = one_var("x", 0.0, 2.0, 1.0);

  core::Dataset ds;
  ds.inputs.resize(3, 1);
  ds.inputs << 0.25, 1.0, 1.75;
  ds.outputs.resize(3, 2);
  ds.outputs << 1.5, -2.0, 0.125, 3.25, 1e-7, 42.0;
  ds.input_names = {"x"};
  ds.output_names = {"f", "g"};

  const std::string path = (tmp.path / "data.csv").string();
  core::write_dataset_csv(path, ds);
  core::CsvLoadReport report;
  const core::Dataset back = core::read_dataset_csv(path, space, &report);
  CHECK(report.rejected_rows == 0);
  CHECK((back.inputs - ds.inputs).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((back.outputs - ds.outputs).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(back.output_names == ds.output_names);

  SUBCASE("rows with nan or inf are dropped and counted") {
    std::ofstream out(path, std::ios::app);
    out << "0.5,nan,1.0\n0.75,2.0,inf\n0.9,1.0,2.0\n";
    out.close();
    const core::Dataset filtered = core::read_dataset_csv(path, space, &report);
    CHECK(report.rejected_rows == 2);
    CHECK(filtered.rows() == 4);
  }

  SUBCASE("mismatched header is rejected") {
    const DesignSpace other = one_var("y", 0.0, 2.0, 1.0);
    CHECK_THROWS_AS(core::read_dataset_csv(path, other), IoError);
  }
}

TEST_CASE("box_minimize solves a bounded quadratic") {
  const auto f = [](const Eigen::VectorXd& v) {
    return (v[0] - 0.3) * (v[0] - 0.3) + 2.0 * (v[1] + 0.7) * (v[1] + 0.7);
  };
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -1.0);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(2, 1.0);
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2);

  const auto r = core::box_minimize(f, nullptr, x0, lo, hi);
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(-0.7).epsilon(1e-6));

  SUBCASE("active bound is respected") {
    lo[1] = -0.2;  // optimum now pinned at the bound
    const auto rb = core::box_minimize(f, nullptr, x0, lo, hi);
    CHECK(rb.x[1] == doctest::Approx(-0.2).epsilon(1e-9));
  }
}

TEST_CASE("rng streams are reproducible and tag-separated") {
  core::Rng a(42), b(42), c(43);
  for (int i = 0; i < 10; ++i) {
    const auto va = a.next();
    CHECK(va == b.next());
    CHECK(va != c.next());
  }
  CHECK(core::derive_seed(1, 2) != core::derive_seed(1, 3));
  CHECK(core::derive_seed(1, 2) == core::derive_seed(1, 2));
  CHECK(core::fnv1a64("D_main") != core::fnv1a64("D_pnt_low"));
}
