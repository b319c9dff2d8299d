#include "couplekit/bench/synthetic_fowt.hpp"

#include <cmath>

#include "couplekit/core/rng.hpp"
#include "couplekit/core/sampling.hpp"

namespace couplekit::bench {

namespace {

// Index order of the platform space.
enum : Eigen::Index {
  kDMain = 0,
  kDPntUp,
  kDPntLow,
  kDOuter,
  kRCs,
  kZKeel,
  kZFrbrd,
  kPsPct,
};

// The synthetic forms are smooth polynomials over all of R^8; scaling to
// hat coordinates is done directly so that evaluations slightly outside the
// box (finite-difference probes) stay well-defined.
Eigen::VectorXd normalized(const Eigen::VectorXd& x) {
  const auto space = platform_space();
  Eigen::VectorXd u(space->size());
  for (Eigen::Index i = 0; i < space->size(); ++i) {
    const auto& v = space->variable(i);
    u[i] = (x[i] - v.lower) / (v.upper - v.lower);
  }
  return u;
}

}  // namespace

std::shared_ptr<const core::DesignSpace> platform_space() {
  static const auto space = std::make_shared<core::DesignSpace>(
      std::vector<core::DesignVariable>{
          {"D_main", 6.0, 14.0, 10.0, core::VariableRole::plant},
          {"D_pnt_up", 0.71, 1.11, 0.91, core::VariableRole::plant},
          {"D_pnt_low", 6.6148, 13.6148, 9.6148, core::VariableRole::plant},
          {"D_outer", 10.5, 14.5, 12.5, core::VariableRole::plant},
          {"R_cs", 41.57, 61.57, 51.75, core::VariableRole::plant},
          {"z_keel", -24.0, -16.0, -20.0, core::VariableRole::plant},
          {"z_frbrd", 7.0, 21.0, 15.0, core::VariableRole::plant},
          {"ps_pct", 0.75, 1.0, 0.85, core::VariableRole::control},
      },
      std::map<std::string, double>{
          {"pc_omega", 0.2},
          {"pc_zeta", 1.0},
          {"vs_omega", 0.12},
          {"vs_zeta", 0.85},
          {"ptfm_freq", 0.2},
          {"flp_omega", 0.0},
      });
  return space;
}

double synthetic_platform_mass(const Eigen::VectorXd& x) {
  const Eigen::VectorXd u = normalized(x);
  double g = 4.2;
  g += 3.1 * u[kDPntLow] * u[kDPntLow] + 1.1 * u[kDPntLow];
  g += 1.5 * u[kDOuter] * u[kDOuter] + 0.6 * u[kDOuter];
  g += 1.2 * u[kRCs] * u[kRCs] + 0.5 * u[kRCs];
  g += 0.9 * (u[kZKeel] - 0.35) * (u[kZKeel] - 0.35);
  g += 0.45 * u[kDMain] * u[kDMain] + 0.2 * u[kDMain];
  g += 0.22 * u[kDPntUp];
  g += 0.35 * u[kZFrbrd];
  g += 0.8 * u[kDPntLow] * u[kDMain];
  g += 0.5 * u[kDPntLow] * u[kDOuter];
  g += 0.4 * u[kRCs] * u[kZKeel];
  g += 0.3 * u[kZKeel] * u[kDOuter];
  g += 0.12 * std::sin(2.2 * u[kDPntLow] + 1.3 * u[kDMain]);
  return 1.0e6 * g;
}

double synthetic_max_pitch(const Eigen::VectorXd& x) {
  const Eigen::VectorXd u = normalized(x);
  double theta = 9.2;
  theta -= 2.6 * u[kDPntLow];
  theta -= 1.5 * u[kDOuter];
  theta -= 1.1 * u[kRCs];
  theta -= 0.5 * u[kDMain];
  theta += 1.0 * u[kZKeel];
  theta += 0.5 * u[kZFrbrd];
  theta -= 1.6 * u[kPsPct];
  theta -= 0.6 * u[kDPntLow] * u[kDOuter];
  theta += 0.08 * std::sin(3.0 * u[kRCs] + 1.1);
  return theta;
}

double synthetic_max_nacelle_accel(const Eigen::VectorXd& x) {
  const Eigen::VectorXd u = normalized(x);
  double a = 0.92;
  a -= 0.35 * u[kPsPct];
  a -= 0.18 * u[kDPntLow];
  a -= 0.10 * u[kDOuter];
  a -= 0.06 * u[kRCs];
  a += 0.10 * u[kZFrbrd];
  a -= 0.05 * u[kDMain];
  a += 0.015 * std::sin(2.4 * u[kPsPct] + 0.4 * u[kZFrbrd]);
  return a;
}

core::Dataset synthetic_fowt(Eigen::Index n, std::uint64_t seed) {
  const auto space = platform_space();
  core::Dataset ds;
  ds.inputs = core::latin_hypercube(*space, n, seed);
  ds.input_names = space->variable_names();
  ds.output_names = {"m_ptfm", "max_theta_ptfm", "max_a_nac"};
  ds.outputs.resize(n, 3);

  core::Rng noise(core::derive_seed(seed, 0xf0f7u));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd x = ds.inputs.row(i).transpose();
    ds.outputs(i, 0) = synthetic_platform_mass(x) + 1.6e4 * noise.normal();
    ds.outputs(i, 1) = synthetic_max_pitch(x) + 0.02 * noise.normal();
    ds.outputs(i, 2) = synthetic_max_nacelle_accel(x) + 0.002 * noise.normal();
  }
  return ds;
}

opt::ProblemDefinition synthetic_problem() {
  const auto space = platform_space();
  opt::ProblemDefinition problem;
  problem.space = space;
  problem.objective = "m_ptfm";
  problem.surfaces.emplace("m_ptfm", std::make_shared<opt::AnalyticSurface>(
                                         space, synthetic_platform_mass));
  problem.surfaces.emplace("max_theta_ptfm", std::make_shared<opt::AnalyticSurface>(
                                                 space, synthetic_max_pitch));
  problem.surfaces.emplace("max_a_nac", std::make_shared<opt::AnalyticSurface>(
                                            space, synthetic_max_nacelle_accel));
  problem.constraints.push_back(
      opt::Constraint{"max_theta_ptfm", kPitchLimitDeg, opt::ConstraintDirection::le});
  problem.constraints.push_back(
      opt::Constraint{"max_a_nac", kNacelleAccelLimit, opt::ConstraintDirection::le});
  problem.validate();
  return problem;
}

dca::CouplingReport demo_coupling_report() {
  const auto space = platform_space();
  const Eigen::Index n = space->size();

  dca::CouplingReport report;
  report.variable_names = space->variable_names();
  report.config.n_sweep = 11;
  report.mask = Eigen::MatrixXi::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) report.mask(i, i) = 1;

  // Row = optimized variable, column = perturbed variable. The pattern:
  // ps_pct drives everything except D_pnt_up with little feedback; the
  // {D_pnt_low, D_outer, R_cs, z_keel} block is mutually strong; D_pnt_low
  // -> D_main is the single strongest coupling; D_main, z_frbrd, D_pnt_up
  // trail off in that order.
  Eigen::MatrixXd jx(n, n);
  // clang-format off
  jx << //       D_main D_pnt_up D_pnt_low D_outer  R_cs  z_keel z_frbrd ps_pct
  /* D_main    */ 0.00,   0.03,    0.45,    0.35,   0.30,  0.33,  0.04,  0.60,
  /* D_pnt_up  */ 0.10,   0.00,    0.45,    0.40,   0.35,  0.38,  0.10,  0.08,
  /* D_pnt_low */ 0.85,   0.05,    0.00,    0.62,   0.58,  0.64,  0.30,  0.70,
  /* D_outer   */ 0.15,   0.04,    0.66,    0.00,   0.57,  0.63,  0.30,  0.65,
  /* R_cs      */ 0.12,   0.03,    0.60,    0.59,   0.00,  0.56,  0.28,  0.60,
  /* z_keel    */ 0.14,   0.04,    0.61,    0.60,   0.58,  0.00,  0.32,  0.70,
  /* z_frbrd   */ 0.08,   0.06,    0.45,    0.40,   0.35,  0.42,  0.00,  1.00,
  /* ps_pct    */ 0.05,   0.05,    0.05,    0.05,   0.05,  0.05,  0.30,  0.00;
  // clang-format on
  report.j_x = jx;

  // Objective sensitivity: constant columns whose maxima rank the
  // variables D_pnt_low > z_keel > D_outer > R_cs > z_frbrd > D_pnt_up >
  // D_main > ps_pct.
  Eigen::VectorXd column_level(n);
  column_level[kDPntLow] = 1.00;
  column_level[kZKeel] = 0.60;
  column_level[kDOuter] = 0.45;
  column_level[kRCs] = 0.40;
  column_level[kZFrbrd] = 0.25;
  column_level[kDPntUp] = 0.15;
  column_level[kDMain] = 0.10;
  column_level[kPsPct] = 0.05;
  report.j_psi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      if (a != b) report.j_psi(a, b) = column_level[b];
    }
  }
  return report;
}

}  // namespace couplekit::bench
