#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

#include "sgm/trajectory.hpp"

namespace sgm::detail {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;

  void append(const Rule& other);
  double integrate(std::span<const double> f) const;
};

/// n-point Gauss-Legendre rule on [a, b].
Rule gauss_legendre(double a, double b, int n);

/// `panels` equal panels of n-point Gauss-Legendre on [a, b].
Rule composite_gauss(double a, double b, int panels, int n);

/// Per-frame Fourier data of u, u_x, u_xx: column k of `re_im[d]` stacks
/// Re c_j then Im c_j (j = 0..n/2) of the d-th derivative of frame k.
struct FrameSpectra {
  std::once_flag built;
  std::size_t half = 0;
  Eigen::MatrixXd re_im[3];
};

void build_spectra(FrameSpectra& s, std::span<const Frame> frames);

/// Rows evaluate a half spectrum at the given points (see FrameSpectra layout).
Eigen::MatrixXd fourier_basis(std::span<const double> x, std::size_t n_grid);

/// Half spectrum of f in the FrameSpectra column layout.
Eigen::VectorXd coeff_column(const SpectralField& f);

/// Time nodes over [ta, tb] for the piecewise-linear interpolant of the frames.
/// With gauss_per_interval = 0 this is the trapezoid rule on the frames plus the
/// two interpolated endpoints; otherwise each frame interval (clipped to the
/// window) carries its own Gauss-Legendre rule.
struct TimeNodes {
  std::vector<double> t;
  std::vector<double> w;
  std::vector<std::size_t> i0;
  std::vector<double> theta;
  std::size_t frames_inside = 0;
};

TimeNodes time_nodes(const Trajectory& traj, double ta, double tb, int gauss_per_interval = 0);

/// Coefficient columns at the time nodes, for derivative order d.
Eigen::MatrixXd window_coeffs(const Trajectory& traj, int d, const TimeNodes& tn);

/// Values of the d-th derivative on (x nodes) x (time nodes).
Eigen::MatrixXd sample_window(const Trajectory& traj, int d, const Eigen::MatrixXd& basis, const TimeNodes& tn);

}  // namespace sgm::detail
