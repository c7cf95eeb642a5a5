#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sgm/cylinder_analysis.hpp"
#include "sgm/trajectory.hpp"

namespace sgm {

/// Scan configuration. The defaults are configuration, not derived constants.
struct Thresholds {
  double eps0 = 1e-3;  ///< Y criterion
  double eps1 = 1e-2;  ///< E criterion
  double eps2 = 5e-2;  ///< A criterion
  double R0 = 0.9;
  std::vector<double> r_scan{0.8, 0.7, 0.6, 0.5};  ///< strictly decreasing, max < R0

  /// Throws std::invalid_argument.
  void validate() const;

  bool operator==(const Thresholds&) const = default;
};

enum class Criterion { Y, E, A };
enum class PointClass { Regular, Suspect, Unclassifiable };

const char* to_string(Criterion c);
const char* to_string(PointClass c);
/// "y", "e" or "a"; throws BadInput otherwise.
Criterion parse_criterion(const std::string& s);

struct Classification {
  PointClass cls = PointClass::Unclassifiable;
  /// Quantity at the smallest admissible radius (the limsup proxy for E and A).
  double value = 0.0;
  /// Smallest admissible radius, 0 when unclassifiable.
  double r = 0.0;
};

/// A radius is admissible when Q(z, r) fits in the run and holds at least 4 frames.
/// Y: Regular if Y(z, r) < eps0 for some admissible r. E, A: Regular if the max
/// over the two smallest admissible radii is below eps1 (eps2).
Classification classify_point(const Trajectory& traj, SpaceTimePoint z, const Thresholds& th, Criterion c);

PointClass classify_point_Y(const Trajectory& traj, SpaceTimePoint z, const Thresholds& th);
PointClass classify_point_E(const Trajectory& traj, SpaceTimePoint z, const Thresholds& th);
PointClass classify_point_A(const Trajectory& traj, SpaceTimePoint z, const Thresholds& th);

struct SuspectPoint {
  double x = 0.0;
  double t = 0.0;
  double value = 0.0;
  double r = 0.0;
};

struct SuspectSet {
  std::vector<SuspectPoint> points;
  Criterion criterion = Criterion::Y;
  Thresholds thresholds;
};

/// Grid points x_j = 2 pi j / nx, t_i = t_lo + i (t_hi - t_lo) / (nt - 1).
struct ScanGrid {
  std::size_t nx = 32;
  std::size_t nt = 9;
  double t_lo = 0.0;
  double t_hi = 0.0;
};

/// ScanGrid over the whole run.
ScanGrid default_grid(const Trajectory& traj, std::size_t nx = 32, std::size_t nt = 9);

struct ScanResult {
  SuspectSet suspects;
  std::size_t regular = 0;
  std::size_t unclassifiable = 0;
};

/// Classifies every grid point; runs on `threads` workers (0 = hardware concurrency).
ScanResult scan(const Trajectory& traj, const ScanGrid& grid, const Thresholds& th, Criterion c,
                unsigned threads = 0);

struct PlanePoint {
  double x = 0.0;
  double t = 0.0;
};

std::vector<PlanePoint> plane_points(const SuspectSet& s);

/// Areas of the Euclidean delta-neighbourhoods of the points, measured on a pixel
/// grid of spacing `pixel` (default: min(deltas) / 8) via an exact distance transform.
std::vector<double> neighbourhood_areas(const std::vector<PlanePoint>& pts, const std::vector<double>& deltas,
                                        std::optional<double> pixel = std::nullopt);

/// 2 - slope of log|K_delta| against log delta (least squares). Empty set -> 0.
double box_dimension(const std::vector<PlanePoint>& pts, const std::vector<double>& deltas);
double box_dimension(const SuspectSet& s, const std::vector<double>& deltas);

/// Parabolic cylinder on T x R with radius r. Distances in x are periodic.
struct CylinderCounts {
  std::size_t M = 0;  ///< greedy maximal packing by disjoint r-cylinders centred at the points
  std::size_t N = 0;  ///< greedy covering count by r-cylinders centred at the points
};

/// Indices of a greedy packing (input order): the Q(p_i, r) are pairwise disjoint
/// and every other point's r-cylinder meets one of them.
std::vector<std::size_t> packing_centres(const std::vector<PlanePoint>& pts, double r);

/// Indices whose r-cylinders cover all points: the smaller of a greedy cover and
/// the packing at r/2 (whose r-cylinders cover).
std::vector<std::size_t> cover_centres(const std::vector<PlanePoint>& pts, double r);

/// M = |packing_centres(r)|, N = |cover_centres(r)|. r in (0, pi/2).
CylinderCounts cylinder_counts(const std::vector<PlanePoint>& pts, double r);

/// Open cylinders Q(a) and Q(b) are disjoint.
bool disjoint(const ParabolicCylinder& a, const ParabolicCylinder& b);
/// Q(inner) lies in Q(outer).
bool contains(const ParabolicCylinder& outer, const ParabolicCylinder& inner);
/// Q(z, factor * r).
ParabolicCylinder dilate(const ParabolicCylinder& q, double factor);

/// Radius-descending greedy selection of pairwise disjoint cylinders; every input
/// lies in the 5-dilate of a selected one.
std::vector<ParabolicCylinder> vitali_disjointify(std::vector<ParabolicCylinder> family);

struct P1Estimate {
  double value = 0.0;  ///< sum of r_i over the selected cylinders
  std::vector<ParabolicCylinder> selected;
  std::vector<SuspectPoint> reclassified;
  std::vector<std::string> warnings;
};

/// For each suspect picks the largest r < delta (scanned geometrically) with
/// E(z, r/5) > eps1, selects a disjoint subfamily of the Q(z, r/5) and sums r.
P1Estimate hausdorff_p1_upper(const Trajectory& traj, const SuspectSet& suspects, double eps1, double delta);

struct CountRow {
  double r = 0.0;
  std::size_t M = 0;
  std::size_t N = 0;
};

struct RegularityReport {
  Criterion criterion = Criterion::Y;
  Thresholds thresholds;
  ScanGrid grid;
  std::vector<SuspectPoint> suspect_points;
  std::size_t regular = 0;
  std::size_t unclassifiable = 0;
  std::vector<CountRow> counts;
  double dimension_estimate = 0.0;
  double p1_upper = 0.0;
  std::vector<std::string> warnings;
};

/// Scan, count tables over th.r_scan, box dimension over deltas derived from the
/// grid spacing, and (E criterion only) the P^1 upper estimate with delta = max r_scan.
RegularityReport regularity_report(const Trajectory& traj, const ScanGrid& grid, const Thresholds& th, Criterion c);

std::string to_json(const RegularityReport& rep, int indent = 2);

}  // namespace sgm
