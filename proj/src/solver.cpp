#include "sgm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "phi_quadrature.hpp"
#include "quadrature.hpp"
#include "sgm/errors.hpp"

namespace sgm {

namespace {

using Coeffs = std::vector<Complex>;

double l2_of(std::span<const Complex> c) {
  const std::size_t half = c.size() - 1;
  double s = 0.0;
  for (std::size_t k = 0; k <= half; ++k) s += ((k == 0 || k == half) ? 1.0 : 2.0) * std::norm(c[k]);
  return std::sqrt(kDomainLength * s);
}

double l2_diff(std::span<const Complex> a, std::span<const Complex> b) {
  const std::size_t half = a.size() - 1;
  double s = 0.0;
  for (std::size_t k = 0; k <= half; ++k) s += ((k == 0 || k == half) ? 1.0 : 2.0) * std::norm(a[k] - b[k]);
  return std::sqrt(kDomainLength * s);
}

// max over modes of |<r, psi_k>| with psi_k = e^{ikx} normalized in H^2.
double h_minus2_sup(std::span<const Complex> r) {
  double m = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double kk = static_cast<double>(k);
    m = std::max(m, std::sqrt(kDomainLength) * std::abs(r[k]) / std::sqrt(1.0 + kk * kk * kk * kk));
  }
  return m;
}

struct Attempt {
  bool ok = false;
  SpectralField u;
  int iterations = 0;
  double residual = 0.0;
};

Attempt picard(const SpectralField& u_prev, double tau, const SolverConfig& cfg) {
  const std::size_t n = u_prev.n_grid();
  const auto prev = u_prev.half_coeffs();
  std::vector<double> denom(prev.size());
  for (std::size_t k = 0; k < prev.size(); ++k) {
    const double kk = static_cast<double>(k);
    denom[k] = 1.0 + tau * kk * kk * kk * kk;
  }
  Attempt out;
  if (!cfg.nonlinear) {
    Coeffs c(prev.begin(), prev.end());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] /= denom[k];
    out.ok = true;
    out.iterations = 1;
    out.u = SpectralField::from_half_coeffs(n, std::move(c));
    return out;
  }
  SpectralField u = u_prev;
  SpectralField nl = sgm_nonlinearity(u, cfg.dealias);
  double prev_change = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= cfg.picard_max_iter; ++m) {
    Coeffs c(prev.size());
    const auto nh = nl.half_coeffs();
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = (prev[k] - tau * nh[k]) / denom[k];
    auto u_new = SpectralField::from_half_coeffs(n, std::move(c));
    auto nl_new = sgm_nonlinearity(u_new, cfg.dealias);
    const double norm = l2_of(u_new.half_coeffs());
    const double diff = l2_diff(u_new.half_coeffs(), u.half_coeffs());
    const double change = norm > 0.0 ? diff / norm : diff;
    Coeffs r(prev.size());
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = nl_new.half_coeffs()[k] - nh[k];
    const double residual = h_minus2_sup(r) / (1.0 + norm);
    out.iterations = m;
    if (!std::isfinite(change) || !std::isfinite(residual)) return out;
    u = std::move(u_new);
    nl = std::move(nl_new);
    out.residual = residual;
    const bool converged = change < cfg.picard_tol && residual <= cfg.picard_tol;
    const bool stagnated = change < 1e-13 && change >= prev_change && residual <= 1e-12;
    if (converged || stagnated) {
      out.ok = true;
      out.u = std::move(u);
      return out;
    }
    if (m >= 3 && change > prev_change && change > 1e-8) return out;
    prev_change = change;
  }
  return out;
}

StepReport step_recursive(const SpectralField& u_prev, double tau, const SolverConfig& cfg, int level) {
  Attempt a = picard(u_prev, tau, cfg);
  if (a.ok) {
    StepReport rep;
    const double s = sobolev_norm(a.u, {2.0, true});
    rep.dissipation = tau * s * s;
    rep.picard_iterations = a.iterations;
    rep.halvings = level;
    rep.residual = a.residual;
    rep.u = std::move(a.u);
    return rep;
  }
  if (level >= cfg.step_halving_max) {
    throw NonConvergence(0, "Picard iteration did not converge (tau = " + std::to_string(tau) + ", " +
                                std::to_string(a.iterations) + " iterations, " + std::to_string(level) +
                                " halvings)");
  }
  StepReport first = step_recursive(u_prev, 0.5 * tau, cfg, level + 1);
  StepReport second = step_recursive(first.u, 0.5 * tau, cfg, level + 1);
  second.picard_iterations += first.picard_iterations + a.iterations;
  second.halvings = std::max(first.halvings, second.halvings);
  second.dissipation += first.dissipation;
  second.residual = std::max(first.residual, second.residual);
  return second;
}

std::vector<double> frame_times(double tau, double t_end) {
  std::vector<double> t{0.0};
  const auto full = static_cast<std::size_t>(std::floor(t_end / tau * (1.0 + 1e-12)));
  for (std::size_t k = 1; k <= full; ++k) t.push_back(static_cast<double>(k) * tau);
  if (t_end - t.back() > 1e-12 * t_end) t.push_back(t_end);
  return t;
}

void require_mean_zero(const SpectralField& u0) {
  if (!u0.is_mean_zero()) {
    throw BadInput("initial datum must have zero mean (mean = " + std::to_string(u0.mean()) + ")");
  }
}

}  // namespace

StepReport implicit_euler_step_report(const SpectralField& u_prev, double tau, const SolverConfig& cfg) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  require_mean_zero(u_prev);
  return step_recursive(u_prev, tau, cfg, 0);
}

SpectralField implicit_euler_step(const SpectralField& u_prev, double tau, const SolverConfig& cfg) {
  return implicit_euler_step_report(u_prev, tau, cfg).u;
}

double scheme_residual(const SpectralField& prev, const SpectralField& next, double tau, const SolverConfig& cfg) {
  if (prev.n_grid() != next.n_grid()) throw std::invalid_argument("grid mismatch");
  const auto a = prev.half_coeffs(), b = next.half_coeffs();
  Coeffs r(b.size());
  std::vector<Complex> nh(b.size());
  if (cfg.nonlinear) {
    const auto nl = sgm_nonlinearity(next, cfg.dealias);
    std::copy(nl.half_coeffs().begin(), nl.half_coeffs().end(), nh.begin());
  }
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double kk = static_cast<double>(k);
    r[k] = b[k] - a[k] + tau * (kk * kk * kk * kk * b[k] + nh[k]);
  }
  return h_minus2_sup(r) / (1.0 + l2_of(b));
}

Trajectory simulate(const SpectralField& u0, const SolverConfig& cfg, RunLog* log) {
  cfg.validate();
  require_mean_zero(u0);
  const auto times = frame_times(cfg.tau, cfg.t_end);
  std::vector<Frame> frames{{0.0, u0}};
  std::vector<double> dissipation{0.0};
  frames.reserve(times.size());
  dissipation.reserve(times.size());
  if (log) {
    *log = RunLog{};
    log->picard_iterations.push_back(0);
    log->halvings.push_back(0);
    log->energy.push_back(energy(u0));
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double tau = times[k] - times[k - 1];
    StepReport rep;
    try {
      rep = step_recursive(frames.back().u, tau, cfg, 0);
    } catch (const NonConvergence& e) {
      throw NonConvergence(k, "step " + std::to_string(k) + " (t = " + std::to_string(times[k]) + "): " + e.what());
    }
    dissipation.push_back(rep.dissipation);
    if (log) {
      log->picard_iterations.push_back(rep.picard_iterations);
      log->halvings.push_back(rep.halvings);
      log->energy.push_back(energy(rep.u));
    }
    frames.push_back({times[k], std::move(rep.u)});
  }
  return Trajectory(cfg, std::move(frames), std::move(dissipation));
}

SpectralField biharmonic_exact(const SpectralField& u0, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("time must be nonnegative");
  Coeffs c(u0.half_coeffs().begin(), u0.half_coeffs().end());
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double kk = static_cast<double>(k);
    c[k] *= std::exp(-kk * kk * kk * kk * t);
  }
  return SpectralField::from_half_coeffs(u0.n_grid(), std::move(c));
}

Trajectory biharmonic_trajectory(const SpectralField& u0, double tau, double t_end) {
  SolverConfig cfg;
  cfg.tau = tau;
  cfg.t_end = t_end;
  cfg.nonlinear = false;
  cfg.validate();
  require_mean_zero(u0);
  std::vector<Frame> frames;
  for (double t : frame_times(tau, t_end)) frames.push_back({t, biharmonic_exact(u0, t)});
  return Trajectory(cfg, std::move(frames));
}

double interior_regularity_probe(const Trajectory& v, double a, double b, std::optional<SpaceTimePoint> center) {
  if (!(b > 0.0 && b < a)) throw std::invalid_argument("need 0 < b < a");
  if (a >= std::numbers::pi) throw std::invalid_argument("spatial radius must be below pi");
  const SpaceTimePoint z = center.value_or(SpaceTimePoint{std::numbers::pi, 0.5 * (v.t_begin() + v.t_end())});
  const double a4 = a * a * a * a, b4 = b * b * b * b;
  if (z.t - a4 < v.t_begin() || z.t + a4 > v.t_end()) throw OutsideDomain("Q_a leaves the time range of the run");

  const auto xa = detail::gauss_legendre(z.x - a, z.x + a, 64);
  const auto ta = detail::time_nodes(v, z.t - a4, z.t + a4);
  if (ta.frames_inside < 4) throw TooFewFrames("fewer than 4 frames in Q_a");
  const auto basis_a = detail::fourier_basis(xa.x, v.n_grid());
  const Eigen::MatrixXd u = detail::sample_window(v, 0, basis_a, ta);
  const Eigen::MatrixXd ux = detail::sample_window(v, 1, basis_a, ta);
  const double l2u = std::sqrt(detail::integrate(xa, ta, u.cwiseAbs2()));
  const double l2ux = std::sqrt(detail::integrate(xa, ta, ux.cwiseAbs2()));

  auto xb = detail::gauss_legendre(z.x - b, z.x + b, 64);
  xb.x.push_back(z.x - b);
  xb.x.push_back(z.x + b);
  const auto tb = detail::time_nodes(v, z.t - b4, z.t + b4);
  const Eigen::MatrixXd uxb = detail::sample_window(v, 1, detail::fourier_basis(xb.x, v.n_grid()), tb);
  const double sup = uxb.cwiseAbs().maxCoeff();

  const double denom = l2u + l2ux;
  return denom > 0.0 ? sup / denom : 0.0;
}

double weak_residual(const Trajectory& traj, const TestFunction& phi) {
  const CutoffSum phis{{1.0, phi}};
  detail::check_cutoff_sum(phis);
  detail::check_inside_run(phis, traj);
  const auto [ta, tb] = detail::phi_time_support(phis);
  const auto xs = detail::phi_space_rule(phis);
  const auto tn = detail::time_nodes(traj, std::max(ta, traj.t_begin()), std::min(tb, traj.t_end()),
                                     detail::kPhiTimeGauss);
  const auto basis = detail::fourier_basis(xs.x, traj.n_grid());
  const Eigen::MatrixXd u = detail::sample_window(traj, 0, basis, tn);
  const Eigen::MatrixXd uxx = detail::sample_window(traj, 2, basis, tn);
  const Eigen::MatrixXd phi_t = detail::phi_matrix(phis, xs, tn, detail::PhiPart::Dt);
  const Eigen::MatrixXd phi_xx = detail::phi_matrix(phis, xs, tn, detail::PhiPart::D2);
  Eigen::MatrixXd integrand = u.cwiseProduct(phi_t) - uxx.cwiseProduct(phi_xx);
  if (traj.nonlinear()) {
    const Eigen::MatrixXd ux = detail::sample_window(traj, 1, basis, tn);
    integrand -= ux.cwiseAbs2().cwiseProduct(phi_xx);
  }
  return std::abs(detail::integrate(xs, tn, integrand));
}

double ux_l10_3_norm(const Trajectory& traj) {
  constexpr double p = 10.0 / 3.0;
  double sum = 0.0;
  const auto frames = traj.frames();
  for (std::size_t k = 1; k < frames.size(); ++k) {
    const auto ux = refine(derivative(frames[k].u, 1), 4 * traj.n_grid());
    double s = 0.0;
    for (double v : ux.samples()) s += std::pow(std::abs(v), p);
    s *= kDomainLength / static_cast<double>(ux.n_grid());
    sum += (frames[k].t - frames[k - 1].t) * s;
  }
  return std::pow(sum, 1.0 / p);
}

double energy(const SpectralField& u) {
  const double n = u.l2_norm();
  return n * n;
}

}  // namespace sgm
