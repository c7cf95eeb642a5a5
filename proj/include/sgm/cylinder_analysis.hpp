#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "sgm/solver.hpp"
#include "sgm/test_function.hpp"
#include "sgm/trajectory.hpp"

namespace sgm {

/// Q(z, r) = (x0 - r, x0 + r) x (t0 - r^4, t0 + r^4), periodic in x.
struct ParabolicCylinder {
  double x0 = 0.0;
  double t0 = 0.0;
  double r = 0.0;

  double t_lo() const { return t0 - r * r * r * r; }
  double t_hi() const { return t0 + r * r * r * r; }
  /// |Q| = 4 r^5.
  double volume() const { return 4.0 * r * r * r * r * r; }
};

/// Whether Q lies in the time range of the run and does not overlap itself in x.
bool fits(const Trajectory& traj, const ParabolicCylinder& q);

struct CylinderStats {
  double Y = 0.0;      ///< r^-2 int_Q |u_x|^3
  double A = 0.0;      ///< max_t r^-1 int_{B_r} u^2
  double A_bar = 0.0;  ///< max_t r^-1 int_{B_r} (u - (u)_r(t))^2
  double E = 0.0;      ///< r^-1 int_Q u_xx^2
  double W = 0.0;      ///< r^-5 int_Q |u|^3
  double mean = 0.0;   ///< average of u over Q
  double sigma_mean_cyl = 0.0;
};

/// Average of u over Q. Throws OutsideDomain / TooFewFrames (fewer than 4 frames in the window).
double cyl_mean(const Trajectory& traj, const ParabolicCylinder& q);

struct SigmaMeans {
  std::vector<double> times;
  /// u^sigma(t) = int u sigma / int sigma at each time node.
  std::vector<double> values;
  /// int_Q u sigma / int_Q sigma.
  double cyl_value = 0.0;
  /// Trapezoid average of `values` over the window.
  double time_average = 0.0;
};

/// sigma must be a SpaceOnly cutoff whose support lies inside B_r(x0).
SigmaMeans sigma_means(const Trajectory& traj, const ParabolicCylinder& q, const TestFunction& sigma);

/// The default sigma for Q: plateau on B_{r/2}, support B_r.
TestFunction default_sigma(const ParabolicCylinder& q);

CylinderStats quantities(const Trajectory& traj, const ParabolicCylinder& q,
                         std::optional<TestFunction> sigma = std::nullopt);

enum class Quantity { Y, A, A_bar, E, W };

/// One entry of CylinderStats, sampling only the derivative it needs.
double quantity(const Trajectory& traj, const ParabolicCylinder& q, Quantity which);

struct PoincareCheck {
  double lhs = 0.0;
  double rhs_bound = 0.0;
  double c_emp = 0.0;
  /// rhs_bound = 0 while lhs > 1e-12.
  bool violation = false;
};

/// lhs = r^-5 int_{Q(z0, r/2)} |u - u_{z0,r/2}|^3, rhs = Y(z0, r) + eta Y(z0, r)^2.
PoincareCheck poincare_residual(const Trajectory& traj, SpaceTimePoint z0, double r, double eta);

/// lhs = r^-5 int_{Q(z0, r)} |u - [u]^sigma_r|^3 sigma, rhs as above.
PoincareCheck corollary_poincare_residual(const Trajectory& traj, SpaceTimePoint z0, double r,
                                          const TestFunction& sigma, double eta);

struct InterpolationCheck {
  /// (A^{11/8} E^{1/8} + A^{3/2}) - W
  double gap_W = 0.0;
  /// A_bar^{5/8} E^{7/8} - Y
  double gap_Y = 0.0;
  double c_emp_W = 0.0;
  double c_emp_Y = 0.0;
};

InterpolationCheck interpolation_residuals(const CylinderStats& stats);

/// Y(z, theta r) / (theta^3 Y(z, r)); 0 when Y(z, r) = 0. theta in (0, 1/4).
double decay_ratio(const Trajectory& traj, SpaceTimePoint z, double r, double theta);

/// v(x, t) = u(lambda x, lambda^4 t) for integer lambda >= 1. Mode k maps to
/// lambda k on a grid lambda times finer, and times shrink by lambda^4.
Trajectory rescale_trajectory(const Trajectory& traj, int lambda);

struct CylinderRow {
  ParabolicCylinder q;
  CylinderStats stats;
};

/// Columns x0,t0,r,Y,A,Abar,E,W,mean with a header line.
void write_stats_csv(std::ostream& os, const std::vector<CylinderRow>& rows);

}  // namespace sgm
