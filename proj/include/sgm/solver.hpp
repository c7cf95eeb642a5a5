#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sgm/test_function.hpp"
#include "sgm/torus_field.hpp"
#include "sgm/trajectory.hpp"

namespace sgm {

struct StepReport {
  SpectralField u;
  /// Total Picard iterations over all substeps.
  int picard_iterations = 0;
  /// Deepest halving level used (0 when the full step converged).
  int halvings = 0;
  /// sum over substeps of tau_s ||u_s,xx||^2.
  double dissipation = 0.0;
  /// Final H^{-2} residual of the scheme relative to (1 + ||u||).
  double residual = 0.0;
};

/// One implicit Euler step (u - u_prev)/tau + u_xxxx + (u_x^2)_xx = 0 solved by
/// Picard iteration, halving the step recursively when the iteration diverges.
/// Throws NonConvergence (step index 0) when all halvings fail.
StepReport implicit_euler_step_report(const SpectralField& u_prev, double tau, const SolverConfig& cfg);

SpectralField implicit_euler_step(const SpectralField& u_prev, double tau, const SolverConfig& cfg);

/// H^-2 sup norm of (next - prev) + tau (next_xxxx + N(next)) over 1 + ||next||, with
/// N dropped when cfg.nonlinear is false.
double scheme_residual(const SpectralField& prev, const SpectralField& next, double tau, const SolverConfig& cfg);

struct RunLog {
  std::vector<int> picard_iterations;
  std::vector<int> halvings;
  /// ||u_k||^2 per frame.
  std::vector<double> energy;
};

/// Frames at t_k = k tau for k = 0..ceil(t_end/tau); the last step is shortened
/// to land on t_end. u0 must be mean-zero (BadInput otherwise).
Trajectory simulate(const SpectralField& u0, const SolverConfig& cfg, RunLog* log = nullptr);

/// Exact biharmonic heat flow: u_hat(k, t) = exp(-k^4 t) u0_hat(k).
SpectralField biharmonic_exact(const SpectralField& u0, double t);

/// The exact biharmonic flow sampled at the same frame times simulate would produce.
Trajectory biharmonic_trajectory(const SpectralField& u0, double tau, double t_end);

struct SpaceTimePoint {
  double x = 0.0;
  double t = 0.0;
};

/// ||v_x||_{L^inf(Q_b)} / (||v||_{L^2(Q_a)} + ||v_x||_{L^2(Q_a)}) on cylinders
/// sharing a center (default: x = pi, t = midpoint of the run).
/// Requires 0 < b < a and Q_a inside the run (OutsideDomain otherwise).
double interior_regularity_probe(const Trajectory& v, double a, double b,
                                 std::optional<SpaceTimePoint> center = std::nullopt);

/// |int int (u phi_t - u_xx phi_xx - u_x^2 phi_xx)| over the support of phi.
/// The u_x^2 term is dropped for linear trajectories.
double weak_residual(const Trajectory& traj, const TestFunction& phi);

/// (sum_k tau_k ||u_k,x||_{L^{10/3}}^{10/3})^{3/10} over the frames k >= 1.
double ux_l10_3_norm(const Trajectory& traj);

/// ||u||^2.
double energy(const SpectralField& u);

}  // namespace sgm
