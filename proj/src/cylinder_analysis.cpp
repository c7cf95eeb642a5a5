#include "sgm/cylinder_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "quadrature.hpp"
#include "sgm/errors.hpp"

namespace sgm {

namespace {

constexpr int kSpaceNodes = 64;
constexpr std::size_t kMinFrames = 4;

void check_cylinder(const Trajectory& traj, const ParabolicCylinder& q) {
  if (!(q.r > 0.0) || !std::isfinite(q.r)) throw std::invalid_argument("cylinder radius must be positive");
  if (q.r >= std::numbers::pi) throw OutsideDomain("cylinder wraps around the torus");
  if (!fits(traj, q)) throw OutsideDomain("cylinder outside the time range of the run");
}

struct Samples {
  detail::Rule xs;
  detail::TimeNodes tn;
  Eigen::MatrixXd u, ux, uxx;
};

enum Need { kU = 1, kUx = 2, kUxx = 4, kAll = 7 };

Samples sample(const Trajectory& traj, const ParabolicCylinder& q, const detail::Rule& xs, int need) {
  check_cylinder(traj, q);
  Samples s;
  s.xs = xs;
  s.tn = detail::time_nodes(traj, q.t_lo(), q.t_hi());
  if (s.tn.frames_inside < kMinFrames) {
    throw TooFewFrames("cylinder of radius " + std::to_string(q.r) + " holds " + std::to_string(s.tn.frames_inside) +
                       " frames");
  }
  const auto basis = detail::fourier_basis(s.xs.x, traj.n_grid());
  if (need & kU) s.u = detail::sample_window(traj, 0, basis, s.tn);
  if (need & kUx) s.ux = detail::sample_window(traj, 1, basis, s.tn);
  if (need & kUxx) s.uxx = detail::sample_window(traj, 2, basis, s.tn);
  return s;
}

Samples sample(const Trajectory& traj, const ParabolicCylinder& q, int need) {
  return sample(traj, q, detail::gauss_legendre(q.x0 - q.r, q.x0 + q.r, kSpaceNodes), need);
}

Eigen::Map<const Eigen::VectorXd> as_vec(const std::vector<double>& v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

double total(const Samples& s, const Eigen::ArrayXXd& f) {
  return as_vec(s.xs.w).dot(f.matrix() * as_vec(s.tn.w));
}

/// Spatial integrals at each time node.
Eigen::VectorXd per_time(const Samples& s, const Eigen::ArrayXXd& f) {
  return f.matrix().transpose() * as_vec(s.xs.w);
}

double y_of(const Samples& s, double r) { return total(s, s.ux.array().abs().cube()) / (r * r); }
double e_of(const Samples& s, double r) { return total(s, s.uxx.array().square()) / r; }
double w_of(const Samples& s, double r) { return total(s, s.u.array().abs().cube()) / std::pow(r, 5); }

/// (A, A_bar)
std::pair<double, double> a_of(const Samples& s, double r) {
  const Eigen::ArrayXXd u = s.u.array();
  const Eigen::VectorXd m2 = per_time(s, u.square());
  const Eigen::VectorXd m1 = per_time(s, u);
  // int (u - (u)_r)^2 = int u^2 - (int u)^2 / 2r
  const Eigen::VectorXd var = m2 - m1.cwiseAbs2() / (2.0 * r);
  return {m2.maxCoeff() / r, std::max(0.0, var.maxCoeff()) / r};
}

void check_sigma(const ParabolicCylinder& q, const TestFunction& sigma) {
  if (sigma.profile() != CutoffProfile::SpaceOnly) throw std::invalid_argument("sigma must be a space-only cutoff");
  const double off = std::abs(std::remainder(sigma.x0() - q.x0, 2.0 * std::numbers::pi));
  if (off + sigma.r_space() > q.r * (1.0 + 1e-12)) throw std::invalid_argument("sigma support leaves B_r");
}

/// Gauss rule over supp sigma, split at the plateau edges.
detail::Rule sigma_rule(const ParabolicCylinder& q, const TestFunction& sigma) {
  const double shift = q.x0 + std::remainder(sigma.x0() - q.x0, 2.0 * std::numbers::pi) - sigma.x0();
  auto b = sigma.space_breaks();
  for (double& v : b) v += shift;
  detail::Rule r = detail::composite_gauss(b[0], b[1], 8, 16);
  r.append(detail::gauss_legendre(b[1], b[2], kSpaceNodes));
  r.append(detail::composite_gauss(b[2], b[3], 8, 16));
  return r;
}

Eigen::VectorXd sigma_weights(const detail::Rule& xs, const TestFunction& sigma) {
  Eigen::VectorXd s(static_cast<Eigen::Index>(xs.x.size()));
  for (std::size_t j = 0; j < xs.x.size(); ++j) s[static_cast<Eigen::Index>(j)] = sigma.space(0, xs.x[j]);
  return s;
}

double window_length(const Samples& s) { return s.tn.t.back() - s.tn.t.front(); }

PoincareCheck finish(double lhs, double y, double eta) {
  PoincareCheck p;
  p.lhs = lhs;
  p.rhs_bound = y + eta * y * y;
  if (p.rhs_bound > 0.0) {
    p.c_emp = lhs / p.rhs_bound;
  } else if (lhs > 1e-12) {
    p.violation = true;
    p.c_emp = std::numeric_limits<double>::infinity();
  }
  return p;
}

}  // namespace

bool fits(const Trajectory& traj, const ParabolicCylinder& q) {
  const double eps = 1e-12 * std::max(1.0, std::abs(traj.t_end()));
  return q.r > 0.0 && q.r < std::numbers::pi && q.t_lo() >= traj.t_begin() - eps && q.t_hi() <= traj.t_end() + eps;
}

double cyl_mean(const Trajectory& traj, const ParabolicCylinder& q) {
  const Samples s = sample(traj, q, kU);
  return total(s, s.u.array()) / (2.0 * q.r * window_length(s));
}

TestFunction default_sigma(const ParabolicCylinder& q) {
  return make_cutoff(q.x0, q.t0, q.r, 1.0, CutoffProfile::SpaceOnly, 0.5);
}

SigmaMeans sigma_means(const Trajectory& traj, const ParabolicCylinder& q, const TestFunction& sigma) {
  check_sigma(q, sigma);
  const Samples s = sample(traj, q, sigma_rule(q, sigma), kU);
  const Eigen::VectorXd sw = sigma_weights(s.xs, sigma).cwiseProduct(as_vec(s.xs.w));
  const double mass = sw.sum();
  const Eigen::VectorXd at = (s.u.transpose() * sw) / mass;
  SigmaMeans out;
  out.times = s.tn.t;
  out.values.assign(at.data(), at.data() + at.size());
  const double len = window_length(s);
  out.time_average = at.dot(as_vec(s.tn.w)) / len;
  out.cyl_value = sw.dot(s.u * as_vec(s.tn.w)) / (mass * len);
  return out;
}

CylinderStats quantities(const Trajectory& traj, const ParabolicCylinder& q, std::optional<TestFunction> sigma) {
  const Samples s = sample(traj, q, kAll);
  const double r = q.r;
  CylinderStats st;
  st.Y = y_of(s, r);
  st.E = e_of(s, r);
  st.W = w_of(s, r);
  st.mean = total(s, s.u.array()) / (2.0 * r * window_length(s));
  std::tie(st.A, st.A_bar) = a_of(s, r);
  st.sigma_mean_cyl = sigma_means(traj, q, sigma ? *sigma : default_sigma(q)).cyl_value;
  return st;
}

PoincareCheck poincare_residual(const Trajectory& traj, SpaceTimePoint z0, double r, double eta) {
  const ParabolicCylinder big{z0.x, z0.t, r};
  const ParabolicCylinder half{z0.x, z0.t, 0.5 * r};
  check_cylinder(traj, big);
  const Samples s = sample(traj, half, kU);
  const double mean = total(s, s.u.array()) / (r * window_length(s));
  const double lhs = total(s, (s.u.array() - mean).abs().cube()) / std::pow(r, 5);
  return finish(lhs, quantity(traj, big, Quantity::Y), eta);
}

PoincareCheck corollary_poincare_residual(const Trajectory& traj, SpaceTimePoint z0, double r,
                                          const TestFunction& sigma, double eta) {
  const ParabolicCylinder q{z0.x, z0.t, r};
  check_sigma(q, sigma);
  const double bracket = sigma_means(traj, q, sigma).cyl_value;
  const Samples s = sample(traj, q, sigma_rule(q, sigma), kU);
  const Eigen::ArrayXXd g = (s.u.array() - bracket).abs().cube().colwise() * sigma_weights(s.xs, sigma).array();
  const double lhs = total(s, g) / std::pow(r, 5);
  return finish(lhs, quantity(traj, q, Quantity::Y), eta);
}

double quantity(const Trajectory& traj, const ParabolicCylinder& q, Quantity which) {
  switch (which) {
    case Quantity::Y:
      return y_of(sample(traj, q, kUx), q.r);
    case Quantity::E:
      return e_of(sample(traj, q, kUxx), q.r);
    case Quantity::W:
      return w_of(sample(traj, q, kU), q.r);
    case Quantity::A:
      return a_of(sample(traj, q, kU), q.r).first;
    case Quantity::A_bar:
      return a_of(sample(traj, q, kU), q.r).second;
  }
  throw std::invalid_argument("unknown quantity");
}

InterpolationCheck interpolation_residuals(const CylinderStats& st) {
  InterpolationCheck c;
  const double rw = std::pow(st.A, 11.0 / 8.0) * std::pow(st.E, 1.0 / 8.0) + std::pow(st.A, 1.5);
  const double ry = std::pow(st.A_bar, 5.0 / 8.0) * std::pow(st.E, 7.0 / 8.0);
  c.gap_W = rw - st.W;
  c.gap_Y = ry - st.Y;
  c.c_emp_W = rw > 0.0 ? st.W / rw : 0.0;
  c.c_emp_Y = ry > 0.0 ? st.Y / ry : 0.0;
  return c;
}

double decay_ratio(const Trajectory& traj, SpaceTimePoint z, double r, double theta) {
  if (!(theta > 0.0 && theta < 0.25)) throw std::invalid_argument("theta must lie in (0, 1/4)");
  const double y_r = quantity(traj, {z.x, z.t, r}, Quantity::Y);
  if (y_r == 0.0) return 0.0;
  return quantity(traj, {z.x, z.t, theta * r}, Quantity::Y) / (theta * theta * theta * y_r);
}

Trajectory rescale_trajectory(const Trajectory& traj, int lambda) {
  if (lambda < 1 || (lambda & (lambda - 1)) != 0) throw std::invalid_argument("lambda must be a power of two");
  const auto lam = static_cast<std::size_t>(lambda);
  const double l4 = std::pow(static_cast<double>(lambda), 4);
  const std::size_t n = traj.n_grid() * lam;
  std::vector<Frame> frames;
  frames.reserve(traj.size());
  for (const auto& f : traj.frames()) {
    std::vector<Complex> half(n / 2 + 1, Complex{0.0, 0.0});
    const auto src = f.u.half_coeffs();
    for (std::size_t k = 0; k < src.size(); ++k) half[k * lam] = src[k];
    frames.push_back({f.t / l4, SpectralField::from_half_coeffs(n, std::move(half))});
  }
  SolverConfig cfg = traj.config();
  cfg.tau /= l4;
  cfg.t_end /= l4;
  // dt ||v_xx||^2 = (dt / lambda^4) lambda^4 ||u_xx||^2
  std::vector<double> diss(traj.dissipation().begin(), traj.dissipation().end());
  return Trajectory(cfg, std::move(frames), std::move(diss));
}

void write_stats_csv(std::ostream& os, const std::vector<CylinderRow>& rows) {
  os << "x0,t0,r,Y,A,Abar,E,W,mean\n";
  os << std::setprecision(17);
  for (const auto& row : rows) {
    const auto& s = row.stats;
    os << row.q.x0 << ',' << row.q.t0 << ',' << row.q.r << ',' << s.Y << ',' << s.A << ',' << s.A_bar << ',' << s.E
       << ',' << s.W << ',' << s.mean << '\n';
  }
}

}  // namespace sgm
