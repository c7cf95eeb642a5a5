#include "sgm/singular_set.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "sgm/errors.hpp"

namespace sgm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double periodic_gap(double a, double b) { return std::abs(std::remainder(a - b, kTwoPi)); }

double pow4(double r) { return r * r * r * r; }

Quantity quantity_for(Criterion c) {
  switch (c) {
    case Criterion::Y:
      return Quantity::Y;
    case Criterion::E:
      return Quantity::E;
    case Criterion::A:
      return Quantity::A;
  }
  return Quantity::Y;
}

double threshold_for(const Thresholds& th, Criterion c) {
  switch (c) {
    case Criterion::Y:
      return th.eps0;
    case Criterion::E:
      return th.eps1;
    case Criterion::A:
      return th.eps2;
  }
  return th.eps0;
}

std::optional<double> try_quantity(const Trajectory& traj, const ParabolicCylinder& q, Quantity which) {
  if (!fits(traj, q)) return std::nullopt;
  try {
    return quantity(traj, q, which);
  } catch (const TooFewFrames&) {
    return std::nullopt;
  }
}

constexpr double kFar = 1e30;

/// 1D squared distance transform (Felzenszwalb-Huttenlocher). f holds 0 at seeds and kFar elsewhere.
void edt_1d(std::vector<double>& f, std::vector<double>& d, std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  int k = 0;
  v[0] = 0;
  z[0] = -inf;
  z[1] = inf;
  for (int q = 1; q < n; ++q) {
    auto cross = [&](int p) { return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p)); };
    double s = cross(v[k]);
    while (s <= z[k]) {
      --k;
      s = cross(v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
  std::copy(d.begin(), d.end(), f.begin());
}

}  // namespace

void Thresholds::validate() const {
  if (!(eps0 > 0 && eps1 > 0 && eps2 > 0)) throw std::invalid_argument("thresholds must be positive");
  if (!(R0 > 0 && R0 < 1)) throw std::invalid_argument("R0 must lie in (0, 1)");
  if (r_scan.empty()) throw std::invalid_argument("r_scan is empty");
  for (std::size_t i = 0; i < r_scan.size(); ++i) {
    if (!(r_scan[i] > 0)) throw std::invalid_argument("scan radii must be positive");
    if (i > 0 && !(r_scan[i] < r_scan[i - 1])) throw std::invalid_argument("r_scan must be strictly decreasing");
  }
  if (!(r_scan.front() < R0)) throw std::invalid_argument("largest scan radius must be below R0");
}

const char* to_string(Criterion c) {
  switch (c) {
    case Criterion::Y:
      return "y";
    case Criterion::E:
      return "e";
    case Criterion::A:
      return "a";
  }
  return "?";
}

const char* to_string(PointClass c) {
  switch (c) {
    case PointClass::Regular:
      return "regular";
    case PointClass::Suspect:
      return "suspect";
    case PointClass::Unclassifiable:
      return "unclassifiable";
  }
  return "?";
}

Criterion parse_criterion(const std::string& s) {
  if (s == "y" || s == "Y") return Criterion::Y;
  if (s == "e" || s == "E") return Criterion::E;
  if (s == "a" || s == "A") return Criterion::A;
  throw BadInput("unknown criterion '" + s + "' (expected y, e or a)");
}

Classification classify_point(const Trajectory& traj, SpaceTimePoint z, const Thresholds& th, Criterion c) {
  th.validate();
  const Quantity which = quantity_for(c);
  std::vector<std::pair<double, double>> vals;  // (r, value), decreasing r
  for (double r : th.r_scan) {
    if (r >= th.R0) continue;
    if (auto v = try_quantity(traj, {z.x, z.t, r}, which)) vals.emplace_back(r, *v);
  }
  Classification out;
  if (vals.empty()) return out;
  const double eps = threshold_for(th, c);
  out.r = vals.back().first;
  if (c == Criterion::Y) {
    out.value = vals.back().second;
    const bool any = std::any_of(vals.begin(), vals.end(), [&](const auto& p) { return p.second < eps; });
    out.cls = any ? PointClass::Regular : PointClass::Suspect;
    return out;
  }
  out.value = vals.back().second;
  if (vals.size() >= 2) out.value = std::max(out.value, vals[vals.size() - 2].second);
  out.cls = out.value < eps ? PointClass::Regular : PointClass::Suspect;
  return out;
}

PointClass classify_point_Y(const Trajectory& traj, SpaceTimePoint z, const Thresholds& th) {
  return classify_point(traj, z, th, Criterion::Y).cls;
}
PointClass classify_point_E(const Trajectory& traj, SpaceTimePoint z, const Thresholds& th) {
  return classify_point(traj, z, th, Criterion::E).cls;
}
PointClass classify_point_A(const Trajectory& traj, SpaceTimePoint z, const Thresholds& th) {
  return classify_point(traj, z, th, Criterion::A).cls;
}

ScanGrid default_grid(const Trajectory& traj, std::size_t nx, std::size_t nt) {
  return {nx, nt, traj.t_begin(), traj.t_end()};
}

ScanResult scan(const Trajectory& traj, const ScanGrid& grid, const Thresholds& th, Criterion c, unsigned threads) {
  th.validate();
  if (grid.nx == 0 || grid.nt == 0) throw std::invalid_argument("empty scan grid");
  if (grid.nt > 1 && !(grid.t_hi > grid.t_lo)) throw std::invalid_argument("scan grid needs t_hi > t_lo");
  const std::size_t total = grid.nx * grid.nt;
  std::vector<Classification> out(total);
  std::vector<SpaceTimePoint> pts(total);
  for (std::size_t i = 0; i < grid.nt; ++i) {
    const double t = grid.nt == 1 ? grid.t_lo : grid.t_lo + (grid.t_hi - grid.t_lo) * i / (grid.nt - 1);
    for (std::size_t j = 0; j < grid.nx; ++j) pts[i * grid.nx + j] = {kTwoPi * j / grid.nx, t};
  }
  traj.spectra();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = w; k < total; k += threads) out[k] = classify_point(traj, pts[k], th, c);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  ScanResult res;
  res.suspects.criterion = c;
  res.suspects.thresholds = th;
  for (std::size_t k = 0; k < total; ++k) {
    switch (out[k].cls) {
      case PointClass::Regular:
        ++res.regular;
        break;
      case PointClass::Unclassifiable:
        ++res.unclassifiable;
        break;
      case PointClass::Suspect:
        res.suspects.points.push_back({pts[k].x, pts[k].t, out[k].value, out[k].r});
        break;
    }
  }
  return res;
}

std::vector<PlanePoint> plane_points(const SuspectSet& s) {
  std::vector<PlanePoint> p;
  for (const auto& q : s.points) p.push_back({q.x, q.t});
  return p;
}

std::vector<double> neighbourhood_areas(const std::vector<PlanePoint>& pts, const std::vector<double>& deltas,
                                        std::optional<double> pixel) {
  if (deltas.empty()) throw std::invalid_argument("no deltas");
  for (double d : deltas)
    if (!(d > 0)) throw std::invalid_argument("deltas must be positive");
  std::vector<double> areas(deltas.size(), 0.0);
  if (pts.empty()) return areas;
  const double dmax = *std::max_element(deltas.begin(), deltas.end());
  const double h = pixel ? *pixel : *std::min_element(deltas.begin(), deltas.end()) / 8.0;
  if (!(h > 0)) throw std::invalid_argument("pixel size must be positive");
  double x0 = pts[0].x, x1 = x0, t0 = pts[0].t, t1 = t0;
  for (const auto& p : pts) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    t0 = std::min(t0, p.t);
    t1 = std::max(t1, p.t);
  }
  const double pad = dmax + 2 * h;
  x0 -= pad;
  t0 -= pad;
  const auto nx = static_cast<std::size_t>(std::ceil((x1 + pad - x0) / h)) + 1;
  const auto nt = static_cast<std::size_t>(std::ceil((t1 + pad - t0) / h)) + 1;
  if (static_cast<double>(nx) * static_cast<double>(nt) > 6e7) {
    throw std::invalid_argument("pixel grid too large for the requested deltas");
  }
  std::vector<double> img(nx * nt, kFar);
  for (const auto& p : pts) {
    const auto i = static_cast<std::size_t>(std::lround((p.x - x0) / h));
    const auto j = static_cast<std::size_t>(std::lround((p.t - t0) / h));
    img[j * nx + i] = 0.0;
  }
  const std::size_t m = std::max(nx, nt);
  std::vector<double> f, d(m);
  std::vector<int> v(m);
  std::vector<double> z(m + 2);
  // columns (t direction), then rows
  for (std::size_t i = 0; i < nx; ++i) {
    f.assign(nt, 0.0);
    d.assign(nt, 0.0);
    for (std::size_t j = 0; j < nt; ++j) f[j] = img[j * nx + i];
    edt_1d(f, d, v, z);
    for (std::size_t j = 0; j < nt; ++j) img[j * nx + i] = f[j];
  }
  for (std::size_t j = 0; j < nt; ++j) {
    f.assign(img.begin() + j * nx, img.begin() + (j + 1) * nx);
    d.assign(nx, 0.0);
    edt_1d(f, d, v, z);
    std::copy(f.begin(), f.end(), img.begin() + j * nx);
  }
  std::vector<double> lim(deltas.size());
  for (std::size_t k = 0; k < deltas.size(); ++k) lim[k] = (deltas[k] / h) * (deltas[k] / h);
  std::vector<std::size_t> counts(deltas.size(), 0);
  for (double s : img) {
    for (std::size_t k = 0; k < deltas.size(); ++k)
      if (s <= lim[k]) ++counts[k];
  }
  for (std::size_t k = 0; k < deltas.size(); ++k) areas[k] = counts[k] * h * h;
  return areas;
}

double box_dimension(const std::vector<PlanePoint>& pts, const std::vector<double>& deltas) {
  if (pts.empty()) return 0.0;
  if (deltas.size() < 2) throw std::invalid_argument("box dimension needs at least two deltas");
  const auto areas = neighbourhood_areas(pts, deltas);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(deltas.size());
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    const double lx = std::log(deltas[k]), ly = std::log(areas[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return 2.0 - slope;
}

double box_dimension(const SuspectSet& s, const std::vector<double>& deltas) {
  return box_dimension(plane_points(s), deltas);
}

bool disjoint(const ParabolicCylinder& a, const ParabolicCylinder& b) {
  return periodic_gap(a.x0, b.x0) >= a.r + b.r || std::abs(a.t0 - b.t0) >= pow4(a.r) + pow4(b.r);
}

bool contains(const ParabolicCylinder& outer, const ParabolicCylinder& inner) {
  const double tol = 1e-12;
  const bool in_x = outer.r >= std::numbers::pi || periodic_gap(outer.x0, inner.x0) + inner.r <= outer.r + tol;
  const bool in_t = std::abs(outer.t0 - inner.t0) + pow4(inner.r) <= pow4(outer.r) * (1 + tol);
  return in_x && in_t;
}

ParabolicCylinder dilate(const ParabolicCylinder& q, double factor) { return {q.x0, q.t0, q.r * factor}; }

std::vector<std::size_t> packing_centres(const std::vector<PlanePoint>& pts, double r) {
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const ParabolicCylinder q{pts[i].x, pts[i].t, r};
    const bool ok = std::all_of(chosen.begin(), chosen.end(),
                                [&](std::size_t j) { return disjoint(q, {pts[j].x, pts[j].t, r}); });
    if (ok) chosen.push_back(i);
  }
  return chosen;
}

namespace {

bool inside(const PlanePoint& p, const PlanePoint& c, double r) {
  return periodic_gap(p.x, c.x) < r && std::abs(p.t - c.t) < pow4(r);
}

}  // namespace

std::vector<std::size_t> cover_centres(const std::vector<PlanePoint>& pts, double r) {
  std::vector<std::size_t> centres;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const bool covered =
        std::any_of(centres.begin(), centres.end(), [&](std::size_t c) { return inside(pts[i], pts[c], r); });
    if (!covered) centres.push_back(i);
  }
  auto half = packing_centres(pts, 0.5 * r);
  return half.size() < centres.size() ? half : centres;
}

CylinderCounts cylinder_counts(const std::vector<PlanePoint>& pts, double r) {
  if (!(r > 0 && r < std::numbers::pi / 2)) throw std::invalid_argument("radius must lie in (0, pi/2)");
  return {packing_centres(pts, r).size(), cover_centres(pts, r).size()};
}

std::vector<ParabolicCylinder> vitali_disjointify(std::vector<ParabolicCylinder> family) {
  std::stable_sort(family.begin(), family.end(), [](const auto& a, const auto& b) { return a.r > b.r; });
  std::vector<ParabolicCylinder> sel;
  for (const auto& q : family) {
    if (std::all_of(sel.begin(), sel.end(), [&](const auto& s) { return disjoint(q, s); })) sel.push_back(q);
  }
  return sel;
}

P1Estimate hausdorff_p1_upper(const Trajectory& traj, const SuspectSet& suspects, double eps1, double delta) {
  if (!(eps1 > 0 && delta > 0)) throw std::invalid_argument("eps1 and delta must be positive");
  P1Estimate est;
  std::vector<ParabolicCylinder> family;
  for (const auto& p : suspects.points) {
    std::optional<double> chosen;
    for (int j = 1; j <= 48 && !chosen; ++j) {
      const double r = delta * std::pow(2.0, -0.25 * j);
      const ParabolicCylinder small{p.x, p.t, r / 5.0};
      if (!fits(traj, small)) continue;
      double e = 0.0;
      try {
        e = quantity(traj, small, Quantity::E);
      } catch (const TooFewFrames&) {
        break;
      }
      if (e > eps1) chosen = r;
    }
    if (!chosen) {
      est.reclassified.push_back(p);
      est.warnings.push_back("no admissible radius below delta at (" + std::to_string(p.x) + ", " +
                             std::to_string(p.t) + "); point treated as regular");
      continue;
    }
    family.push_back({p.x, p.t, *chosen / 5.0});
  }
  for (const auto& q : vitali_disjointify(family)) {
    est.selected.push_back(q);
    est.value += 5.0 * q.r;
  }
  return est;
}

RegularityReport regularity_report(const Trajectory& traj, const ScanGrid& grid, const Thresholds& th, Criterion c) {
  const ScanResult sr = scan(traj, grid, th, c);
  RegularityReport rep;
  rep.criterion = c;
  rep.thresholds = th;
  rep.grid = grid;
  rep.suspect_points = sr.suspects.points;
  rep.regular = sr.regular;
  rep.unclassifiable = sr.unclassifiable;
  const auto pts = plane_points(sr.suspects);
  for (double r : th.r_scan) {
    const auto cc = cylinder_counts(pts, r);
    rep.counts.push_back({r, cc.M, cc.N});
  }
  const double dx = kTwoPi / static_cast<double>(grid.nx);
  const double dt = grid.nt > 1 ? (grid.t_hi - grid.t_lo) / static_cast<double>(grid.nt - 1) : dx;
  const double g = std::max(dx, dt);
  rep.dimension_estimate = box_dimension(pts, {8 * g, 4 * g, 2 * g, g});
  if (sr.unclassifiable > 0) {
    rep.warnings.push_back(std::to_string(sr.unclassifiable) + " grid points had no admissible radius");
  }
  if (c == Criterion::E) {
    const auto p1 = hausdorff_p1_upper(traj, sr.suspects, th.eps1, th.r_scan.front());
    rep.p1_upper = p1.value;
    rep.warnings.insert(rep.warnings.end(), p1.warnings.begin(), p1.warnings.end());
  }
  return rep;
}

std::string to_json(const RegularityReport& rep, int indent) {
  using nlohmann::json;
  json j;
  j["criterion"] = to_string(rep.criterion);
  j["thresholds"] = {{"eps0", rep.thresholds.eps0}, {"eps1", rep.thresholds.eps1}, {"eps2", rep.thresholds.eps2},
                     {"R0", rep.thresholds.R0},     {"r_scan", rep.thresholds.r_scan}};
  j["grid"] = {{"nx", rep.grid.nx}, {"nt", rep.grid.nt}, {"t_lo", rep.grid.t_lo}, {"t_hi", rep.grid.t_hi}};
  j["suspect_points"] = json::array();
  for (const auto& p : rep.suspect_points) {
    j["suspect_points"].push_back({{"x", p.x}, {"t", p.t}, {"value", p.value}, {"r", p.r}});
  }
  j["regular_points"] = rep.regular;
  j["unclassifiable_points"] = rep.unclassifiable;
  j["counts"] = json::array();
  for (const auto& row : rep.counts) j["counts"].push_back({{"r", row.r}, {"M_r", row.M}, {"N_r", row.N}});
  j["dimension_estimate"] = rep.dimension_estimate;
  j["p1_upper"] = rep.p1_upper;
  j["warnings"] = rep.warnings;
  return j.dump(indent);
}

}  // namespace sgm
