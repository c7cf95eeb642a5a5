#include "sgm/campanato.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "quadrature.hpp"
#include "sgm/errors.hpp"

namespace sgm {

namespace {

constexpr int kNodesPerCell = 8;
constexpr int kNodesPerCoarseCell = 3;
constexpr std::size_t kCoarseAbove = 64;
constexpr std::size_t kMinNodes = 4;

struct AxisNode {
  std::size_t i0 = 0, i1 = 0;
  double s = 0.0;
  double w = 0.0;
};

/// Part [sa, sb] (cell fractions) of the cell between nodes i0 and i1.
struct Piece {
  std::size_t i0 = 0, i1 = 0;
  double sa = 0.0, sb = 1.0;
  double len = 0.0;
};

double grid_pos(const std::vector<double>& xs, bool periodic, double period, long k) {
  if (!periodic) return xs[static_cast<std::size_t>(k)];
  const long n = static_cast<long>(xs.size());
  const long m = k >= 0 ? k / n : -((-k + n - 1) / n);
  return xs[static_cast<std::size_t>(k - m * n)] + static_cast<double>(m) * period;
}

std::size_t wrap(long k, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((k % m) + m) % m);
}

/// Cell pieces covering [a, b].
std::vector<Piece> axis_pieces(const std::vector<double>& xs, bool periodic, double period, double a, double b,
                                const char* axis) {
  const double eps = 1e-12 * std::max(1.0, std::abs(b));
  const std::size_t n = xs.size();
  long k0 = 0, k1 = 0;
  if (!periodic) {
    if (a < xs.front() - eps || b > xs.back() + eps) {
      throw OutsideDomain(std::string("cylinder leaves the sampled ") + axis + " range");
    }
    a = std::max(a, xs.front());
    b = std::min(b, xs.back());
    k0 = static_cast<long>(std::upper_bound(xs.begin(), xs.end(), a) - xs.begin()) - 1;
    k0 = std::clamp<long>(k0, 0, static_cast<long>(n) - 2);
    k1 = static_cast<long>(n) - 1;
  } else {
    if (b - a >= period) throw OutsideDomain("cylinder wraps around the periodic axis");
    const double shift = std::floor((a - xs.front()) / period) * period;
    a -= shift;
    b -= shift;
    k0 = static_cast<long>(std::upper_bound(xs.begin(), xs.end(), a) - xs.begin()) - 1;
    k1 = k0 + 2 * static_cast<long>(n) + 1;
  }
  std::size_t inside = 0;
  for (long k = k0; k <= k1; ++k) {
    const double pos = grid_pos(xs, periodic, period, k);
    if (pos > b + eps) break;
    if (pos >= a - eps) ++inside;
  }
  if (inside < kMinNodes) {
    throw UnderResolved(std::string("cylinder spans ") + std::to_string(inside) + " grid nodes along " + axis);
  }
  std::vector<Piece> out;
  for (long k = k0; k < k1; ++k) {
    const double lo = grid_pos(xs, periodic, period, k), hi = grid_pos(xs, periodic, period, k + 1);
    if (lo >= b) break;
    const double pa = std::max(lo, a), pb = std::min(hi, b);
    if (pb <= pa) continue;
    out.push_back({wrap(k, n), wrap(k + 1, n), (pa - lo) / (hi - lo), (pb - lo) / (hi - lo), pb - pa});
  }
  return out;
}

/// Gauss-Legendre nodes on each piece.
std::vector<AxisNode> axis_rule(const std::vector<Piece>& pieces) {
  const int per_cell = pieces.size() > kCoarseAbove ? kNodesPerCoarseCell : kNodesPerCell;
  std::vector<AxisNode> out;
  out.reserve(pieces.size() * per_cell);
  const auto ref = detail::gauss_legendre(0.0, 1.0, per_cell);
  for (const auto& pc : pieces) {
    const double ds = pc.sb - pc.sa;
    for (std::size_t q = 0; q < ref.x.size(); ++q) out.push_back({pc.i0, pc.i1, pc.sa + ds * ref.x[q], ref.w[q] * pc.len});
  }
  return out;
}

double abs_pow(double v, double p) {
  v = std::abs(v);
  if (p == std::floor(p) && p <= 8) {
    double out = 1;
    for (int k = 0; k < static_cast<int>(p); ++k) out *= v;
    return out;
  }
  return std::pow(v, p);
}

/// int_0^len |g|^p for g linear from ga to gb.
double abs_power_integral(double ga, double gb, double len, double p) {
  const double d = gb - ga;
  const double big = std::max(std::abs(ga), std::abs(gb));
  if (big == 0) return 0.0;
  if (std::abs(d) <= 1e-6 * big) {
    const auto& rule = detail::gauss_legendre(0.0, 1.0, 4);
    double acc = 0;
    for (std::size_t q = 0; q < rule.x.size(); ++q) acc += rule.w[q] * abs_pow(ga + d * rule.x[q], p);
    return len * acc;
  }
  const double pa = abs_pow(ga, p + 1), pb = abs_pow(gb, p + 1);
  const double num = ga * gb < 0 ? pa + pb : std::abs(pb - pa);
  return len * num / ((p + 1) * std::abs(d));
}

void check_kind(const SampledField& f, const AnisotropicCylinder& q) {
  if (q.n1 != 1) throw std::invalid_argument("only n1 = 1 is supported");
  if (q.n2 != 0 && q.n2 != 1) throw std::invalid_argument("only n2 in {0, 1} is supported");
  if (q.alpha < 1) throw std::invalid_argument("alpha must be a positive integer");
  if ((q.n2 == 0) != f.space_only()) throw std::invalid_argument("cylinder kind does not match the field");
  if (!(q.r > 0)) throw std::invalid_argument("cylinder radius must be positive");
}

/// The cylinder as linear x-segments, one set per time node with weight w_t.
struct CylinderLines {
  std::vector<Piece> xs;
  std::vector<double> wt;
  std::vector<double> ga, gb;  ///< values at the segment ends, time-node major
};

CylinderLines cylinder_lines(const SampledField& f, const AnisotropicCylinder& q) {
  check_kind(f, q);
  CylinderLines c;
  c.xs = axis_pieces(f.x, f.periodic_x, f.period, q.x - q.r, q.x + q.r, "x");
  std::vector<AxisNode> tr{{0, 0, 0.0, 1.0}};
  if (!f.space_only()) {
    const double h = std::pow(q.r, q.alpha);
    tr = axis_rule(axis_pieces(f.t, false, 0.0, q.y - h, q.y + h, "t"));
  }
  auto value = [&](std::size_t i, const AxisNode& nt) {
    if (f.space_only()) return f.at(i, 0);
    return (1 - nt.s) * f.at(i, nt.i0) + nt.s * f.at(i, nt.i1);
  };
  c.ga.reserve(c.xs.size() * tr.size());
  c.gb.reserve(c.xs.size() * tr.size());
  for (const auto& nt : tr) {
    c.wt.push_back(nt.w);
    for (const auto& pc : c.xs) {
      const double v0 = value(pc.i0, nt), v1 = value(pc.i1, nt);
      c.ga.push_back(v0 + pc.sa * (v1 - v0));
      c.gb.push_back(v0 + pc.sb * (v1 - v0));
    }
  }
  return c;
}

bool in_region(const SampledField& f, const Region& reg, const AnisotropicCylinder& q) {
  const double eps = 1e-12;
  if (!f.periodic_x && (q.x - q.r < reg.x_lo - eps || q.x + q.r > reg.x_hi + eps)) return false;
  if (f.periodic_x && reg.x_hi - reg.x_lo < f.period - eps &&
      (q.x - q.r < reg.x_lo - eps || q.x + q.r > reg.x_hi + eps)) {
    return false;
  }
  if (!f.space_only()) {
    const double h = std::pow(q.r, q.alpha);
    if (q.y - h < reg.t_lo - eps || q.y + h > reg.t_hi + eps) return false;
  }
  return true;
}

std::vector<GridPoint> centres(const SampledField& f, const Region& reg, const CampanatoGrids& g, double r,
                               int alpha) {
  if (g.relative_step <= 0) return g.z;
  std::vector<GridPoint> out;
  const double sx = g.relative_step * r;
  const auto nx = static_cast<std::size_t>(std::floor((reg.x_hi - reg.x_lo) / sx + 1e-9));
  std::vector<double> ts{reg.t_lo};
  if (!f.space_only()) {
    const double st = g.relative_step * std::pow(r, alpha);
    const auto nt = static_cast<std::size_t>(std::floor((reg.t_hi - reg.t_lo) / st + 1e-9));
    for (std::size_t j = 1; j <= nt; ++j) ts.push_back(reg.t_lo + static_cast<double>(j) * st);
  }
  for (double t : ts)
    for (std::size_t i = 0; i <= nx; ++i) out.push_back({reg.x_lo + static_cast<double>(i) * sx, t});
  return out;
}

void check_grids(const CampanatoGrids& g) {
  if (g.r.empty() || (g.z.empty() && g.relative_step <= 0)) throw std::invalid_argument("empty Campanato grid");
  auto r = g.r;
  std::sort(r.begin(), r.end(), std::greater<>());
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (!(r[k] > 0)) throw std::invalid_argument("radii must be positive");
    if (k > 0 && r[k - 1] / r[k] > std::cbrt(10.0) * (1 + 1e-9)) {
      throw std::invalid_argument("radius grid coarser than 3 radii per decade");
    }
  }
}

}  // namespace

void SampledField::validate() const {
  if (x.size() < 2 || t.empty()) throw BadInput("sampled field needs at least two x nodes and one t node");
  if (values.size() != x.size() * t.size()) throw BadInput("sampled field value count does not match the grid");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw BadInput("x nodes must be strictly increasing");
  for (std::size_t j = 1; j < t.size(); ++j)
    if (!(t[j] > t[j - 1])) throw BadInput("t nodes must be strictly increasing");
  if (periodic_x && !(x.front() + period > x.back())) throw BadInput("period too short for the x nodes");
  for (double v : values)
    if (!std::isfinite(v)) throw BadInput("sampled field contains non-finite values");
}

SampledField sample_line(double a, double b, std::size_t n, double (*f)(double)) {
  SampledField s;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    s.x.push_back(x);
    s.values.push_back(f(x));
  }
  return s;
}

double AnisotropicCylinder::volume() const {
  return std::pow(2.0, n1 + n2) * std::pow(r, homogeneous_dim());
}

AnisotropicCylinder cylinder_for(const SampledField& f, double x, double y, double r, int alpha) {
  return {1, f.space_only() ? 0 : 1, alpha, x, y, r};
}

AnisoMean aniso_mean(const SampledField& f, const AnisotropicCylinder& q, double p) {
  if (!(p >= 1)) throw std::invalid_argument("p must be at least 1");
  const auto c = cylinder_lines(f, q);
  const std::size_t nx = c.xs.size();
  double len = 0, tw = 0;
  for (const auto& pc : c.xs) len += pc.len;
  for (double w : c.wt) tw += w;
  double integral = 0;
  for (std::size_t j = 0; j < c.wt.size(); ++j) {
    double line = 0;
    for (std::size_t i = 0; i < nx; ++i) line += 0.5 * c.xs[i].len * (c.ga[j * nx + i] + c.gb[j * nx + i]);
    integral += c.wt[j] * line;
  }
  AnisoMean m;
  m.mean = integral / (len * tw);
  double osc = 0;
  for (std::size_t j = 0; j < c.wt.size(); ++j) {
    double line = 0;
    for (std::size_t i = 0; i < nx; ++i) {
      line += abs_power_integral(c.ga[j * nx + i] - m.mean, c.gb[j * nx + i] - m.mean, c.xs[i].len, p);
    }
    osc += c.wt[j] * line;
  }
  m.p_oscillation = std::pow(osc / (len * tw), 1.0 / p);
  return m;
}

AverageComparison average_comparison_check(const SampledField& f, const AnisotropicCylinder& q, double theta,
                                           double p) {
  if (!(theta > 0 && theta <= 1)) throw std::invalid_argument("theta must lie in (0, 1]");
  const auto big = aniso_mean(f, q, p);
  AnisotropicCylinder small = q;
  small.r = theta * q.r;
  const auto sm = aniso_mean(f, small, 1.0);
  return {std::abs(sm.mean - big.mean), std::pow(theta, -q.homogeneous_dim()) * big.p_oscillation};
}

Region full_region(const SampledField& f) {
  Region r;
  r.x_lo = f.x.front();
  r.x_hi = f.periodic_x ? f.x.front() + f.period : f.x.back();
  r.t_lo = f.t.front();
  r.t_hi = f.t.back();
  return r;
}

CampanatoGrids default_grids(const SampledField& f, const Region& region, int alpha) {
  double dx = 0, dt = 0;
  for (std::size_t i = 1; i < f.x.size(); ++i) dx = std::max(dx, f.x[i] - f.x[i - 1]);
  for (std::size_t j = 1; j < f.t.size(); ++j) dt = std::max(dt, f.t[j] - f.t[j - 1]);
  CampanatoGrids g;
  g.relative_step = 0.25;
  double r = 0.25 * (region.x_hi - region.x_lo);
  if (!f.space_only()) r = std::min(r, 0.999 * std::pow(0.25 * (region.t_hi - region.t_lo), 1.0 / alpha));
  while (r >= 2.5 * dx && (f.space_only() || std::pow(r, alpha) >= 2.5 * dt)) {
    g.r.push_back(r);
    r *= 0.5;
  }
  return g;
}

CampanatoProfile campanato_profile(const SampledField& f, const Region& region, double p, const CampanatoGrids& g,
                                   int alpha) {
  f.validate();
  check_grids(g);
  CampanatoProfile prof;
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  for (double r : g.r) {
    const auto zs = centres(f, region, g, r, alpha);
    std::vector<double> worst_of(workers, -1.0);
    auto run = [&](unsigned w) {
      for (std::size_t k = w; k < zs.size(); k += workers) {
        const auto q = cylinder_for(f, zs[k].x, zs[k].t, r, alpha);
        if (!in_region(f, region, q)) continue;
        try {
          worst_of[w] = std::max(worst_of[w], aniso_mean(f, q, p).p_oscillation);
        } catch (const UnderResolved&) {
        } catch (const OutsideDomain&) {
        }
      }
    };
    if (zs.size() < 64) {
      for (unsigned w = 0; w < workers; ++w) run(w);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
      for (auto& th : pool) th.join();
    }
    const double worst = *std::max_element(worst_of.begin(), worst_of.end());
    const bool any = worst >= 0;
    if (any) {
      prof.r.push_back(r);
      prof.worst.push_back(worst);
    }
  }
  return prof;
}

double campanato_seminorm(const SampledField& f, const Region& region, double p, double beta,
                          const CampanatoGrids& g, int alpha) {
  const auto prof = campanato_profile(f, region, p, g, alpha);
  if (prof.r.empty()) throw std::invalid_argument("no resolved cylinder inside the region");
  double m = 0;
  for (std::size_t k = 0; k < prof.r.size(); ++k) m = std::max(m, prof.worst[k] * std::pow(prof.r[k], -beta));
  return m;
}

HolderFit holder_fit(const SampledField& f, const Region& region, double p, const CampanatoGrids& g, int alpha) {
  const auto prof = campanato_profile(f, region, p, g, alpha);
  HolderFit fit;
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < prof.r.size(); ++k) {
    if (prof.worst[k] > 0) {
      lx.push_back(std::log(prof.r[k]));
      ly.push_back(std::log(prof.worst[k]));
    }
  }
  if (lx.size() < 2) {
    fit.holder = prof.worst.empty() ? false : true;
    fit.warnings.push_back("fewer than two radii with nonzero oscillation; no slope fitted");
    return fit;
  }
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sx += lx[k];
    sy += ly[k];
    sxx += lx[k] * lx[k];
    sxy += lx[k] * ly[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.M_hat = std::exp((sy - slope * sx) / n);
  fit.beta_hat = std::max(0.0, slope);
  if (slope <= 0) fit.warnings.push_back("non-positive fit slope; beta_hat set to 0");
  if (slope < kHolderSlopeFloor) {
    fit.holder = false;
    fit.warnings.push_back("oscillation does not decay with r: not Hoelder continuous on this grid");
  }
  // two-point quotients under d = |x - y| + |t - s|^{1/alpha}
  const double rmax = *std::max_element(prof.r.begin(), prof.r.end());
  const std::size_t sx_stride = std::max<std::size_t>(1, f.x.size() / 256);
  const std::size_t st_stride = std::max<std::size_t>(1, f.t.size() / 16);
  struct Node {
    double x, t, v;
  };
  std::vector<Node> nodes;
  for (std::size_t j = 0; j < f.t.size(); j += st_stride) {
    if (f.t[j] < region.t_lo - 1e-12 || f.t[j] > region.t_hi + 1e-12) continue;
    for (std::size_t i = 0; i < f.x.size(); i += sx_stride) {
      if (!f.periodic_x && (f.x[i] < region.x_lo - 1e-12 || f.x[i] > region.x_hi + 1e-12)) continue;
      nodes.push_back({f.x[i], f.t[j], f.at(i, j)});
    }
  }
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      double dxv = std::abs(nodes[a].x - nodes[b].x);
      if (f.periodic_x) dxv = std::abs(std::remainder(dxv, f.period));
      const double d = dxv + std::pow(std::abs(nodes[a].t - nodes[b].t), 1.0 / alpha);
      if (d <= 0 || d > rmax) continue;
      fit.quotient_max = std::max(fit.quotient_max, std::abs(nodes[a].v - nodes[b].v) / std::pow(d, fit.beta_hat));
    }
  }
  fit.c_measured = fit.M_hat > 0 ? fit.quotient_max / fit.M_hat : 0.0;
  return fit;
}

std::string to_json(const HolderFit& fit, double seminorm, double p, double beta, int indent) {
  nlohmann::json j;
  j["p"] = p;
  j["beta"] = beta;
  j["seminorm"] = seminorm;
  j["beta_hat"] = fit.beta_hat;
  j["M_hat"] = fit.M_hat;
  j["quotient_max"] = fit.quotient_max;
  j["c_measured"] = fit.c_measured;
  j["holder"] = fit.holder;
  j["warnings"] = fit.warnings;
  return j.dump(indent);
}

SampledField read_field_csv(std::istream& in) {
  std::map<std::pair<double, double>, double> cells;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string a, b, c, extra;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ',') ||
        std::getline(ss, extra, ',')) {
      throw BadInput("CSV line " + std::to_string(lineno) + ": expected three columns x,t,value");
    }
    double x, t, v;
    try {
      std::size_t pa, pb, pc;
      x = std::stod(a, &pa);
      t = std::stod(b, &pb);
      v = std::stod(c, &pc);
    } catch (const std::exception&) {
      if (lineno == 1) continue;
      throw BadInput("CSV line " + std::to_string(lineno) + ": non-numeric entry");
    }
    if (!cells.emplace(std::pair{t, x}, v).second) {
      throw BadInput("CSV line " + std::to_string(lineno) + ": duplicate (x, t)");
    }
  }
  if (cells.empty()) throw BadInput("CSV holds no samples");
  std::vector<double> xs, ts;
  for (const auto& [k, v] : cells) {
    ts.push_back(k.first);
    xs.push_back(k.second);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  if (cells.size() != xs.size() * ts.size()) throw BadInput("CSV samples do not form a full rectilinear grid");
  SampledField f;
  f.x = xs;
  f.t = ts;
  f.values.reserve(cells.size());
  for (const auto& [k, v] : cells) f.values.push_back(v);
  f.validate();
  return f;
}

SampledField field_from_trajectory(const Trajectory& traj) {
  SampledField f;
  const std::size_t n = traj.n_grid();
  for (std::size_t i = 0; i < n; ++i) f.x.push_back(SpectralField::grid_point(n, i));
  f.t.clear();
  for (const auto& fr : traj.frames()) {
    f.t.push_back(fr.t);
    f.values.insert(f.values.end(), fr.u.samples().begin(), fr.u.samples().end());
  }
  f.periodic_x = true;
  f.period = 2.0 * std::numbers::pi;
  return f;
}

}  // namespace sgm
