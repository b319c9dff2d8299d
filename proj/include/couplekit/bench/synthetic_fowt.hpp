#pragma once

#include <cstdint>
#include <memory>

#include "couplekit/core/dataset.hpp"
#include "couplekit/core/design_space.hpp"
#include "couplekit/dca/sweep.hpp"
#include "couplekit/opt/problem.hpp"

namespace couplekit::bench {

/// The eight-variable floating-platform design space used by the demos:
/// seven geometry variables plus the peak-shaving control fraction, with
/// the usual six extra controller settings carried as fixed parameters.
std::shared_ptr<const core::DesignSpace> platform_space();

/// Constraint limits wired into the demo problem: platform pitch <= 6.9 deg
/// and nacelle fore-aft acceleration <= 0.7 m/s^2.
constexpr double kPitchLimitDeg = 6.9;
constexpr double kNacelleAccelLimit = 0.7;

/// Smooth synthetic responses over the platform space (model units). These
/// are fixed documented polynomial + interaction forms, NOT physics: they
/// exist so the whole pipeline can run reproducibly without a simulator.
double synthetic_platform_mass(const Eigen::VectorXd& x);
double synthetic_max_pitch(const Eigen::VectorXd& x);
double synthetic_max_nacelle_accel(const Eigen::VectorXd& x);

/// LHS-sampled dataset through the synthetic responses with a little
/// seeded observation noise. Channels: m_ptfm, max_theta_ptfm, max_a_nac.
/// Bit-identical regeneration under a fixed seed.
core::Dataset synthetic_fowt(Eigen::Index n, std::uint64_t seed);

/// The synthetic responses wrapped as analytic surfaces with the demo
/// constraint limits (useful for tests that want the pipeline without
/// surrogate training).
opt::ProblemDefinition synthetic_problem();

/// Hand-built reference coupling pattern over the platform space: the
/// control variable drives every geometry variable except D_pnt_up, four
/// geometry variables are mutually coupled, and D_pnt_low carries both the
/// top objective sensitivity and the strongest single coupling (to
/// D_main). Used to exercise plan and subset construction deterministically
/// without running a sweep.
dca::CouplingReport demo_coupling_report();

}  // namespace couplekit::bench
