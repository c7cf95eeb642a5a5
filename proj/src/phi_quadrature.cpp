#include "phi_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sgm/errors.hpp"

namespace sgm::detail {

namespace {

constexpr int kTransitionPanels = 32;
constexpr int kTransitionNodes = 24;
constexpr int kPlateauNodes = 64;

double term_value(const TestFunction& phi, PhiPart part, double x, double t) {
  if (part == PhiPart::Dt) return phi.dt(x, t);
  return phi.dx(static_cast<int>(part), x, t);
}

}  // namespace

void check_cutoff_sum(const CutoffSum& phis) {
  if (phis.empty()) throw std::invalid_argument("empty test-function combination");
  for (const auto& term : phis) {
    if (!(term.weight >= 0.0)) throw std::invalid_argument("test function must be nonnegative (negative weight)");
    if (term.phi.profile() != CutoffProfile::SpaceTime) {
      throw std::invalid_argument("test function must be compactly supported in time");
    }
  }
}

void check_inside_run(const CutoffSum& phis, const Trajectory& traj) {
  const auto [ta, tb] = phi_time_support(phis);
  const double eps = 1e-12 * std::max(1.0, traj.t_end());
  if (ta < traj.t_begin() - eps || tb > traj.t_end() + eps) {
    throw OutsideDomain("test-function support leaves the time range of the run");
  }
}

Rule phi_space_rule(const CutoffSum& phis) {
  check_cutoff_sum(phis);
  const double ref = phis.front().phi.x0();
  std::vector<double> centers;
  std::vector<double> breaks;
  for (const auto& term : phis) {
    const double c = ref + std::remainder(term.phi.x0() - ref, 2.0 * std::numbers::pi);
    centers.push_back(c);
    const double r = term.phi.r_space(), a = term.phi.plateau();
    for (double b : {c - r, c - a * r, c + a * r, c + r}) breaks.push_back(b);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  if (breaks.back() - breaks.front() > 2.0 * std::numbers::pi + 1e-12) {
    throw std::invalid_argument("combined test-function support wraps around the torus");
  }
  Rule rule;
  for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
    const double lo = breaks[j], hi = breaks[j + 1];
    if (hi - lo < 1e-14) continue;
    const double mid = 0.5 * (lo + hi);
    bool active = false, transition = false;
    for (std::size_t i = 0; i < phis.size(); ++i) {
      const double rho = std::abs(mid - centers[i]) / phis[i].phi.r_space();
      if (rho < 1.0) active = true;
      if (rho < 1.0 && rho > phis[i].phi.plateau()) transition = true;
    }
    if (!active) continue;
    rule.append(transition ? composite_gauss(lo, hi, kTransitionPanels, kTransitionNodes)
                           : gauss_legendre(lo, hi, kPlateauNodes));
  }
  return rule;
}

std::pair<double, double> phi_time_support(const CutoffSum& phis) {
  check_cutoff_sum(phis);
  double ta = phis.front().phi.t_min(), tb = phis.front().phi.t_max();
  for (const auto& term : phis) {
    ta = std::min(ta, term.phi.t_min());
    tb = std::max(tb, term.phi.t_max());
  }
  return {ta, tb};
}

Eigen::MatrixXd phi_matrix(const CutoffSum& phis, const Rule& xs, const TimeNodes& tn, PhiPart part) {
  const auto m = static_cast<Eigen::Index>(xs.x.size());
  const auto nt = static_cast<Eigen::Index>(tn.t.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, nt);
  const int kx = part == PhiPart::Dt ? 0 : static_cast<int>(part);
  const int kt = part == PhiPart::Dt ? 1 : 0;
  for (const auto& term : phis) {
    Eigen::VectorXd sx(m);
    Eigen::RowVectorXd st(nt);
    for (Eigen::Index j = 0; j < m; ++j) sx(j) = term.phi.space(kx, xs.x[static_cast<std::size_t>(j)]);
    for (Eigen::Index l = 0; l < nt; ++l) st(l) = term.phi.time(kt, tn.t[static_cast<std::size_t>(l)]);
    out.noalias() += term.weight * sx * st;
  }
  return out;
}

Eigen::VectorXd phi_slice(const CutoffSum& phis, const Rule& xs, double t, PhiPart part) {
  const auto m = static_cast<Eigen::Index>(xs.x.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
  for (const auto& term : phis) {
    for (Eigen::Index j = 0; j < m; ++j) {
      out(j) += term.weight * term_value(term.phi, part, xs.x[static_cast<std::size_t>(j)], t);
    }
  }
  return out;
}

double integrate(const Rule& xs, const TimeNodes& tn, const Eigen::MatrixXd& m) {
  const Eigen::Map<const Eigen::VectorXd> wx(xs.w.data(), static_cast<Eigen::Index>(xs.w.size()));
  const Eigen::Map<const Eigen::VectorXd> wt(tn.w.data(), static_cast<Eigen::Index>(tn.w.size()));
  return wx.dot(m * wt);
}

}  // namespace sgm::detail
