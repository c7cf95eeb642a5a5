#include "sgm/local_energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "phi_quadrature.hpp"
#include "quadrature.hpp"
#include "sgm/errors.hpp"

namespace sgm {

namespace {

using detail::PhiPart;

struct Window {
  detail::Rule xs;
  detail::TimeNodes tn;
  bool empty = true;
  Eigen::MatrixXd u, ux, uxx;
  Eigen::MatrixXd phi, phi_x, phi_xx, phi_xxxx, phi_t;
  Eigen::VectorXd u_at_t, phi_at_t;
};

Window make_window(const Trajectory& traj, const CutoffSum& phis, double t) {
  detail::check_cutoff_sum(phis);
  detail::check_inside_run(phis, traj);
  if (!(t > traj.t_begin() && t <= traj.t_end())) throw OutsideDomain("evaluation time outside the run");
  Window w;
  w.xs = detail::phi_space_rule(phis);
  const auto [ta, tb] = detail::phi_time_support(phis);
  const double lo = std::max(ta, traj.t_begin());
  const double hi = std::min(tb, t);
  const auto basis = detail::fourier_basis(w.xs.x, traj.n_grid());
  w.u_at_t = basis * detail::coeff_column(traj.at(t));
  w.phi_at_t = detail::phi_slice(phis, w.xs, t, PhiPart::D0);
  if (!(hi > lo)) return w;
  w.empty = false;
  w.tn = detail::time_nodes(traj, lo, hi, detail::kPhiTimeGauss);
  w.u = detail::sample_window(traj, 0, basis, w.tn);
  w.ux = detail::sample_window(traj, 1, basis, w.tn);
  w.uxx = detail::sample_window(traj, 2, basis, w.tn);
  w.phi = detail::phi_matrix(phis, w.xs, w.tn, PhiPart::D0);
  w.phi_x = detail::phi_matrix(phis, w.xs, w.tn, PhiPart::D1);
  w.phi_xx = detail::phi_matrix(phis, w.xs, w.tn, PhiPart::D2);
  w.phi_xxxx = detail::phi_matrix(phis, w.xs, w.tn, PhiPart::D4);
  w.phi_t = detail::phi_matrix(phis, w.xs, w.tn, PhiPart::Dt);
  return w;
}

LeiTerms terms_from(const Window& w, bool nonlinear, double K) {
  LeiTerms out;
  const Eigen::Map<const Eigen::VectorXd> wx(w.xs.w.data(), static_cast<Eigen::Index>(w.xs.w.size()));
  const Eigen::VectorXd vt = w.u_at_t.array() - K;
  out.boundary = 0.5 * wx.dot(vt.cwiseAbs2().cwiseProduct(w.phi_at_t));
  if (w.empty) return out;
  const Eigen::ArrayXXd v = w.u.array() - K;
  const Eigen::ArrayXXd ux = w.ux.array();
  const Eigen::ArrayXXd ux2 = ux.square();
  Eigen::ArrayXXd flux = 0.5 * (w.phi_t.array() - w.phi_xxxx.array()) * v.square() + 2.0 * ux2 * w.phi_xx.array();
  if (nonlinear) {
    flux -= (5.0 / 3.0) * ux2 * ux * w.phi_x.array();
    flux -= ux2 * v * w.phi_xx.array();
  }
  out.flux = detail::integrate(w.xs, w.tn, flux.matrix());
  out.dissipation = detail::integrate(w.xs, w.tn, (w.uxx.array().square() * w.phi.array()).matrix());
  return out;
}

}  // namespace

LeiTerms lei_terms(const Trajectory& traj, const CutoffSum& phis, double t, double K) {
  return terms_from(make_window(traj, phis, t), traj.nonlinear(), K);
}

double lei_slack(const Trajectory& traj, const CutoffSum& phis, double t) {
  return lei_terms(traj, phis, t).slack();
}

double lei_slack(const Trajectory& traj, const TestFunction& phi, double t) {
  return lei_slack(traj, CutoffSum{{1.0, phi}}, t);
}

double lei_shift_consistency(const Trajectory& traj, const TestFunction& phi, double t, double K) {
  const CutoffSum phis{{1.0, phi}};
  const Window w = make_window(traj, phis, t);
  const double s0 = terms_from(w, traj.nonlinear(), 0.0).slack();
  const double sk = terms_from(w, traj.nonlinear(), K).slack();
  const Eigen::Map<const Eigen::VectorXd> wx(w.xs.w.data(), static_cast<Eigen::Index>(w.xs.w.size()));
  double weak = wx.dot(w.u_at_t.cwiseProduct(w.phi_at_t));
  double mass = -wx.dot(w.phi_at_t);
  if (!w.empty) {
    Eigen::ArrayXXd g = w.u.array() * w.phi_t.array() - w.u.array() * w.phi_xxxx.array();
    if (traj.nonlinear()) g -= w.ux.array().square() * w.phi_xx.array();
    weak -= detail::integrate(w.xs, w.tn, g.matrix());
    mass += detail::integrate(w.xs, w.tn, (w.phi_t - w.phi_xxxx));
  }
  const double correction = K * weak + 0.5 * K * K * mass;
  return std::abs(sk - s0 - correction);
}

std::vector<TestFunction> lei_probe_family(const Trajectory& traj) {
  const double t0 = traj.t_begin(), span = traj.t_end() - traj.t_begin();
  std::vector<TestFunction> family;
  const double xs[] = {0.5, 2.0, 3.5, 5.0};
  struct Shape {
    double t_frac, r_space, r_time_frac;
  };
  const Shape shapes[] = {{0.3, 0.6, 0.05}, {0.6, 0.8, 0.08}, {0.45, 0.45, 0.03}};
  for (const auto& s : shapes) {
    for (double x : xs) {
      family.push_back(make_cutoff(x, t0 + s.t_frac * span, s.r_space, s.r_time_frac * span));
    }
  }
  return family;
}

}  // namespace sgm
