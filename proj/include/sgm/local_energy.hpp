#pragma once

#include <vector>

#include "sgm/test_function.hpp"
#include "sgm/trajectory.hpp"

namespace sgm {

/// Pieces of the local energy balance up to time t.
struct LeiTerms {
  /// int int [ (phi_t - phi_xxxx) u^2 / 2 + 2 u_x^2 phi_xx - (5/3) u_x^3 phi_x - u_x^2 u phi_xx ]
  double flux = 0.0;
  /// int int u_xx^2 phi
  double dissipation = 0.0;
  /// (1/2) int u(t)^2 phi(t)
  double boundary = 0.0;

  double slack() const { return flux - boundary - dissipation; }
};

/// Local energy terms over [0, t] with u replaced by u - K. The cubic terms are
/// omitted for linear (nonlinearity-off) trajectories. Time integrals use
/// 3-point Gauss-Legendre on each frame interval of the piecewise-linear interpolant.
/// Throws std::invalid_argument for negative weights or phi without time cutoff,
/// OutsideDomain when the support leaves the run or t is outside (t_begin, t_end].
LeiTerms lei_terms(const Trajectory& traj, const CutoffSum& phis, double t, double K = 0.0);

/// RHS - LHS of the local energy inequality.
double lei_slack(const Trajectory& traj, const TestFunction& phi, double t);
double lei_slack(const Trajectory& traj, const CutoffSum& phis, double t);

/// |slack(u - K) - slack(u) - correction(K)|, where
/// correction(K) = K [int u(t) phi(t) - int int (u phi_t - u phi_xxxx - u_x^2 phi_xx)]
///               + K^2/2 [int int (phi_t - phi_xxxx) - int phi(t)].
double lei_shift_consistency(const Trajectory& traj, const TestFunction& phi, double t, double K);

/// A fixed family of space-time cutoffs spread over the run: supports start after
/// 10% of the run so that the steepest initial transients have decayed.
std::vector<TestFunction> lei_probe_family(const Trajectory& traj);

}  // namespace sgm
