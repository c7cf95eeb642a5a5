#pragma once

#include <Eigen/Dense>

#include "quadrature.hpp"
#include "sgm/test_function.hpp"
#include "sgm/trajectory.hpp"

namespace sgm::detail {

/// Gauss nodes per frame interval for integrals against a test function.
inline constexpr int kPhiTimeGauss = 3;

/// Spatial rule over the union of the supports: composite Gauss-Legendre on
/// transition bands, one 64-node panel on plateaus.
Rule phi_space_rule(const CutoffSum& phis);

/// Union of the time supports (SpaceTime profiles only).
std::pair<double, double> phi_time_support(const CutoffSum& phis);

enum class PhiPart { D0 = 0, D1 = 1, D2 = 2, D3 = 3, D4 = 4, Dt = 5 };

/// sum_i w_i (part of phi_i) on (x nodes) x (time nodes).
Eigen::MatrixXd phi_matrix(const CutoffSum& phis, const Rule& xs, const TimeNodes& tn, PhiPart part);

/// sum_i w_i (part of phi_i)(x_j, t) as a vector over x nodes.
Eigen::VectorXd phi_slice(const CutoffSum& phis, const Rule& xs, double t, PhiPart part);

/// Rejects negative weights, SpaceOnly terms and empty sums.
void check_cutoff_sum(const CutoffSum& phis);

/// Throws OutsideDomain unless the time support lies in [t_begin, t_end] of the run.
void check_inside_run(const CutoffSum& phis, const Trajectory& traj);

/// Weighted double sum sum_j sum_l wx_j wt_l M(j, l).
double integrate(const Rule& xs, const TimeNodes& tn, const Eigen::MatrixXd& m);

}  // namespace sgm::detail
