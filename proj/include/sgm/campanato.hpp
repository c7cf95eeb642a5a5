#pragma once

#include <istream>
#include <string>
#include <vector>

#include "sgm/trajectory.hpp"

namespace sgm {

/// Samples on a rectilinear grid, interpolated (bi)linearly. A single time node
/// makes a pure-space field.
struct SampledField {
  std::vector<double> x;       ///< strictly increasing
  std::vector<double> t{0.0};  ///< strictly increasing
  std::vector<double> values;  ///< values[j * x.size() + i] = f(x_i, t_j)
  bool periodic_x = false;
  /// With periodic_x, x.front() + period follows x.back().
  double period = 0.0;

  bool space_only() const { return t.size() == 1; }
  double at(std::size_t i, std::size_t j = 0) const { return values[j * x.size() + i]; }
  /// Throws BadInput.
  void validate() const;
};

/// Pure-space field f(x_i) on a uniform grid over [a, b].
SampledField sample_line(double a, double b, std::size_t n, double (*f)(double));

/// B_r(x) x B_{r^alpha}(y); n2 = 0 drops the second factor. Only n1 = 1 and n2 in {0, 1} are supported.
struct AnisotropicCylinder {
  int n1 = 1;
  int n2 = 1;
  int alpha = 4;
  double x = 0.0;
  double y = 0.0;
  double r = 0.0;

  int homogeneous_dim() const { return n1 + alpha * n2; }
  /// V r^n with V = 2^{n1 + n2}.
  double volume() const;
};

/// The cylinder kind matching the field (n2 = 0 for space-only fields).
AnisotropicCylinder cylinder_for(const SampledField& f, double x, double y, double r, int alpha = 4);

struct AnisoMean {
  double mean = 0.0;
  double p_oscillation = 0.0;  ///< (avg |f - mean|^p)^{1/p}
};

/// Throws OutsideDomain when Q leaves the grid, UnderResolved when fewer than 4
/// grid nodes fall inside Q along some axis.
AnisoMean aniso_mean(const SampledField& f, const AnisotropicCylinder& q, double p);

struct AverageComparison {
  double lhs = 0.0;  ///< |f_{theta r} - f_r|
  double rhs = 0.0;  ///< theta^-n (avg_{Q_r} |f - f_r|^p)^{1/p}
};

AverageComparison average_comparison_check(const SampledField& f, const AnisotropicCylinder& q, double theta,
                                           double p);

struct Region {
  double x_lo = 0.0, x_hi = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
};

struct GridPoint {
  double x = 0.0;
  double t = 0.0;
};

struct CampanatoGrids {
  std::vector<double> r;
  std::vector<GridPoint> z;
  /// When positive, the centres for radius r are the lattice
  /// (x_lo + i s r, t_lo + j s r^alpha) inside the region, s = relative_step, and z is unused.
  double relative_step = 0.0;
};

/// Radii halving from a quarter of the region width while the cylinders stay
/// resolved; centres on the relative lattice with step r / 4.
CampanatoGrids default_grids(const SampledField& f, const Region& region, int alpha = 4);

/// Whole sampled domain (one period for periodic x).
Region full_region(const SampledField& f);

struct CampanatoProfile {
  std::vector<double> r;
  std::vector<double> worst;  ///< max over centres of the p-oscillation at r
};

/// Worst p-oscillation per radius over the centres whose cylinder lies in the region
/// and is resolved. Radii without any such centre are dropped.
CampanatoProfile campanato_profile(const SampledField& f, const Region& region, double p, const CampanatoGrids& g,
                                   int alpha = 4);

/// max over (z, r) of r^-beta p_oscillation. Throws std::invalid_argument for
/// empty grids or radius ratios coarser than 3 per decade.
double campanato_seminorm(const SampledField& f, const Region& region, double p, double beta,
                          const CampanatoGrids& g, int alpha = 4);

struct HolderFit {
  double beta_hat = 0.0;
  double M_hat = 0.0;
  /// max |f(a) - f(b)| / d(a, b)^beta_hat over sampled pairs, d = |x - y| + |t - s|^{1/alpha}
  double quotient_max = 0.0;
  /// quotient_max / M_hat
  double c_measured = 0.0;
  bool holder = true;
  std::vector<std::string> warnings;
};

/// Slopes below this are reported as not Hoelder continuous.
inline constexpr double kHolderSlopeFloor = 0.05;

HolderFit holder_fit(const SampledField& f, const Region& region, double p, const CampanatoGrids& g, int alpha = 4);

std::string to_json(const HolderFit& fit, double seminorm, double p, double beta, int indent = 2);

/// CSV with columns x,t,value (header line optional) on a full rectilinear grid. Throws BadInput.
SampledField read_field_csv(std::istream& in);

/// Frames of a trajectory sampled on the solver grid, periodic in x.
SampledField field_from_trajectory(const Trajectory& traj);

}  // namespace sgm
