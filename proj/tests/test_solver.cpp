#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "oracles.hpp"
#include "sgm/errors.hpp"
#include "sgm/solver.hpp"

using namespace sgm;
using oracle::kPi;

namespace {

SolverConfig config(double tau, double t_end, bool nonlinear = true) {
  SolverConfig c;
  c.tau = tau;
  c.t_end = t_end;
  c.nonlinear = nonlinear;
  return c;
}

double l2_dist(const SpectralField& a, const SpectralField& b) { return (a - b).l2_norm(); }

// Fixed-point oracle on a finer grid: plain sample-space arithmetic with a direct
// dense Fourier matrix, iterated to 1e-14.
std::vector<double> brute_force_step(const std::function<double(double)>& u_prev, double tau, std::size_t n,
                                     int kmax) {
  // Represent fields by coefficients a_k (cos) and b_k (sin), k = 1..kmax.
  std::vector<double> a(kmax + 1), b(kmax + 1), pa(kmax + 1), pb(kmax + 1);
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = 2 * kPi * j / n;
  for (int k = 1; k <= kmax; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      pa[k] += 2.0 / n * u_prev(x[j]) * std::cos(k * x[j]);
      pb[k] += 2.0 / n * u_prev(x[j]) * std::sin(k * x[j]);
    }
  }
  a = pa;
  b = pb;
  for (int it = 0; it < 500; ++it) {
    std::vector<double> sq(n);
    for (std::size_t j = 0; j < n; ++j) {
      double ux = 0.0;
      for (int k = 1; k <= kmax; ++k) ux += k * (-a[k] * std::sin(k * x[j]) + b[k] * std::cos(k * x[j]));
      sq[j] = ux * ux;
    }
    double change = 0.0;
    for (int k = 1; k <= kmax; ++k) {
      double ca = 0.0, cb = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        ca += 2.0 / n * sq[j] * std::cos(k * x[j]);
        cb += 2.0 / n * sq[j] * std::sin(k * x[j]);
      }
      const double d = 1.0 + tau * std::pow(k, 4);
      const double na = (pa[k] + tau * k * k * ca) / d, nb = (pb[k] + tau * k * k * cb) / d;
      change = std::max({change, std::abs(na - a[k]), std::abs(nb - b[k])});
      a[k] = na;
      b[k] = nb;
    }
    if (change < 1e-15) break;
  }
  std::vector<double> out;
  for (int k = 1; k <= kmax; ++k) {
    out.push_back(a[k]);
    out.push_back(b[k]);
  }
  return out;
}

}  // namespace

TEST(SolverConfig, Validation) {
  EXPECT_NO_THROW(config(1e-3, 1.0).validate());
  EXPECT_THROW(config(0.0, 1.0).validate(), std::invalid_argument);
  EXPECT_THROW(config(2.0, 1.0).validate(), std::invalid_argument);
  auto c = config(1e-3, 1.0);
  c.picard_tol = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(ImplicitEuler, ZeroIsFixedPoint) {
  const auto u = implicit_euler_step(SpectralField::zero(32), 1e-3, config(1e-3, 1));
  for (double v : u.samples()) EXPECT_EQ(v, 0.0);
}

TEST(ImplicitEuler, LinearDiagonalSolve) {
  const double tau = 0.01;
  const auto u0 = oracle::sample(32, [](double x) { return std::cos(x); });
  const auto u = implicit_euler_step(u0, tau, config(tau, 1, false));
  for (double x : {0.0, 1.0, 2.5}) EXPECT_NEAR(u.value_at(x), std::cos(x) / (1 + tau), 1e-14);
}

TEST(ImplicitEuler, MatchesRefinedFixedPointOracle) {
  const double tau = 1e-3;
  auto f = [](double x) { return 0.1 * std::cos(x); };
  const auto u = implicit_euler_step(oracle::sample(32, f), tau, config(tau, 1));
  // The exact discrete solution of a cos x datum only populates modes up to 10
  // to this accuracy; the oracle keeps 10 modes on a 4x grid (n = 128 > 3 * 10).
  const auto ref = brute_force_step(f, tau, 128, 10);
  for (int k = 1; k <= 10; ++k) {
    EXPECT_NEAR(2 * u.coeff(k).real(), ref[2 * (k - 1)], 1e-10) << k;
    EXPECT_NEAR(-2 * u.coeff(k).imag(), ref[2 * (k - 1) + 1], 1e-10) << k;
  }
}

TEST(ImplicitEuler, EnergyIdentityPerStep) {
  // Exact identity: ||u||^2 + ||u - u_prev||^2 + 2 tau ||u_xx||^2 = ||u_prev||^2,
  // which implies the inequality ||u||^2 + tau ||u_xx||^2 <= ||u_prev||^2.
  const auto p = oracle::random_poly(21, 10, 0.6);
  const auto u0 = oracle::sample(64, p);
  const double tau = 2e-3;
  const auto rep = implicit_euler_step_report(u0, tau, config(tau, 1));
  const double lhs = energy(rep.u) + energy(rep.u - u0) + 2 * rep.dissipation;
  EXPECT_NEAR(lhs, energy(u0), 1e-9 * energy(u0));
  EXPECT_LE(energy(rep.u) + rep.dissipation, energy(u0) * (1 + 1e-10));
  EXPECT_LT(std::abs(rep.u.mean()), 1e-13);
}

TEST(ImplicitEuler, StepHalvingRescuesLargeSteps) {
  const auto u0 = oracle::sample(64, [](double x) { return 2.0 * std::cos(x) + std::sin(3 * x); });
  auto cfg = config(0.2, 1.0);
  const auto rep = implicit_euler_step_report(u0, 0.2, cfg);
  EXPECT_GT(rep.halvings, 0);
  EXPECT_LE(energy(rep.u) + rep.dissipation, energy(u0) * (1 + 1e-10));
}

TEST(ImplicitEuler, NonConvergenceWithoutHalving) {
  const auto u0 = oracle::sample(64, [](double x) { return 2.0 * std::cos(x) + std::sin(3 * x); });
  auto cfg = config(0.2, 1.0);
  cfg.step_halving_max = 0;
  EXPECT_THROW(implicit_euler_step(u0, 0.2, cfg), NonConvergence);
}

TEST(ImplicitEuler, RejectsNonzeroMean) {
  const auto u0 = oracle::sample(32, [](double x) { return 1.0 + std::cos(x); });
  EXPECT_THROW(implicit_euler_step(u0, 1e-3, config(1e-3, 1)), BadInput);
}

TEST(Simulate, ZeroDatum) {
  const auto traj = simulate(SpectralField::zero(32), config(0.01, 0.1));
  EXPECT_EQ(traj.size(), 11u);
  for (const auto& f : traj.frames())
    for (double v : f.u.samples()) EXPECT_EQ(v, 0.0);
}

TEST(Simulate, LinearRepeatedDiagonalSolve) {
  const double tau = 0.01;
  const auto traj = simulate(oracle::sample(32, [](double x) { return std::cos(x); }), config(tau, 0.2, false));
  for (std::size_t k = 0; k < traj.size(); ++k) {
    EXPECT_NEAR(traj.frame(k).u.value_at(0.0), std::pow(1 + tau, -double(k)), 1e-13);
  }
}

TEST(Simulate, PartialLastStep) {
  const auto traj = simulate(oracle::sample(32, [](double x) { return std::cos(x); }), config(0.03, 0.1, false));
  EXPECT_EQ(traj.size(), 5u);
  EXPECT_DOUBLE_EQ(traj.t_end(), 0.1);
  EXPECT_NEAR(traj.frames()[4].u.value_at(0.0), std::pow(1.03, -3) / 1.01, 1e-13);
}

TEST(Simulate, EnergyNonincreasingAndGlobalInequality) {
  const auto u0 = oracle::sample(64, [](double x) { return 0.5 * std::cos(x) + 0.3 * std::sin(2 * x); });
  RunLog log;
  const auto traj = simulate(u0, config(1e-3, 0.5), &log);
  double diss = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    EXPECT_LE(log.energy[k], log.energy[k - 1]);
    diss += traj.dissipation()[k];
    EXPECT_LE(log.energy[k] + diss, log.energy[0] * (1 + 1e-8));
    EXPECT_LT(std::abs(traj.frame(k).u.mean()), 1e-13);
  }
}

TEST(Simulate, Deterministic) {
  const auto u0 = oracle::sample(64, oracle::random_poly(5, 10, 0.8));
  const auto a = simulate(u0, config(2e-3, 0.1));
  const auto b = simulate(u0, config(2e-3, 0.1));
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(std::memcmp(a.frame(k).u.samples().data(), b.frame(k).u.samples().data(), 64 * sizeof(double)), 0);
  }
}

TEST(Simulate, LinearConsistencyFirstOrder) {
  const auto u0 = oracle::sample(32, [](double x) { return std::cos(x); });
  std::vector<double> err;
  for (double tau : {1e-2, 5e-3, 2.5e-3}) {
    const auto traj = simulate(u0, config(tau, 1.0, false));
    err.push_back(l2_dist(traj.frames().back().u, biharmonic_exact(u0, 1.0)));
  }
  for (int i = 0; i < 2; ++i) {
    const double order = std::log2(err[i] / err[i + 1]);
    EXPECT_GE(order, 0.9);
    EXPECT_LE(order, 1.1);
  }
  EXPECT_LT(err.back(), 1e-3);
}

TEST(BiharmonicExact, Examples) {
  const auto c1 = oracle::sample(32, [](double x) { return std::cos(x); });
  const auto c2 = oracle::sample(32, [](double x) { return std::cos(2 * x); });
  EXPECT_LT(max_abs_diff(biharmonic_exact(c1, 0.0), c1), 1e-15);
  EXPECT_NEAR(biharmonic_exact(c1, 1.0).value_at(0.3), std::exp(-1.0) * std::cos(0.3), 1e-14);
  EXPECT_NEAR(biharmonic_exact(c2, 0.1).value_at(0.3), std::exp(-1.6) * std::cos(0.6), 1e-14);
  EXPECT_THROW(biharmonic_exact(c1, -1.0), std::invalid_argument);
}

TEST(InteriorRegularityProbe, ZeroField) {
  const auto v = biharmonic_trajectory(SpectralField::zero(64), 1e-3, 2.5);
  EXPECT_EQ(interior_regularity_probe(v, 1.0, 0.5), 0.0);
}

TEST(InteriorRegularityProbe, StableUnderGridRefinement) {
  auto f = [](double x) { return std::cos(x); };
  const auto a = biharmonic_trajectory(oracle::sample(64, f), 1e-2, 2.5);
  const auto b = biharmonic_trajectory(oracle::sample(128, f), 1e-2, 2.5);
  const double ra = interior_regularity_probe(a, 1.0, 0.5), rb = interior_regularity_probe(b, 1.0, 0.5);
  EXPECT_GT(ra, 0.0);
  EXPECT_NEAR(ra / rb, 1.0, 0.05);
}

TEST(InteriorRegularityProbe, BoundedOverEnsemble) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto u0 = oracle::sample(64, oracle::random_poly(seed, 8, 1.0, 1.0));
    const auto v = biharmonic_trajectory(u0, 1e-2, 2.5);
    const double r = interior_regularity_probe(v, 1.0, 0.5);
    EXPECT_TRUE(std::isfinite(r));
    worst = std::max(worst, r);
  }
  // Observed ensemble maximum; far from any blow-up.
  EXPECT_LT(worst, 10.0);
}

TEST(InteriorRegularityProbe, RejectsBadRadii) {
  const auto v = biharmonic_trajectory(SpectralField::zero(64), 1e-2, 2.5);
  EXPECT_THROW(interior_regularity_probe(v, 0.5, 1.0), std::invalid_argument);
  EXPECT_THROW(interior_regularity_probe(v, 1.2, 0.5), OutsideDomain);
}

TEST(WeakResidual, ZeroTrajectory) {
  const auto traj = simulate(SpectralField::zero(32), config(1e-2, 1.0));
  EXPECT_EQ(weak_residual(traj, make_cutoff(1.0, 0.5, 0.8, 0.2)), 0.0);
}

TEST(WeakResidual, ExactLinearFlowVanishes) {
  const auto u0 = oracle::sample(64, [](double x) { return std::cos(x) + 0.2 * std::sin(2 * x); });
  const auto traj = biharmonic_trajectory(u0, 1e-3, 1.0);
  for (const auto& phi : {make_cutoff(1.0, 0.5, 0.8, 0.2), make_cutoff(4.0, 0.3, 1.5, 0.1)}) {
    EXPECT_LT(weak_residual(traj, phi), 1e-6);
  }
}

TEST(WeakResidual, ConvergesUnderStepHalving) {
  const auto u0 = oracle::sample(64, [](double x) { return 0.5 * std::cos(x) + 0.3 * std::sin(2 * x); });
  const auto phi = make_cutoff(2.0, 0.3, 1.0, 0.15);
  const double r1 = weak_residual(simulate(u0, config(2e-3, 0.5)), phi);
  const double r2 = weak_residual(simulate(u0, config(1e-3, 0.5)), phi);
  EXPECT_GE(r1 / r2, 1.8);
}

TEST(WeakResidual, SupportOutsideRun) {
  const auto traj = simulate(SpectralField::zero(32), config(1e-2, 1.0));
  EXPECT_THROW(weak_residual(traj, make_cutoff(1.0, 0.95, 0.8, 0.2)), OutsideDomain);
}

TEST(Ux10Over3, BoundedUnderRefinement) {
  const auto u0 = oracle::sample(64, [](double x) { return 0.5 * std::cos(x) + 0.3 * std::sin(2 * x); });
  const double e0 = energy(u0);
  std::vector<double> v;
  for (double tau : {4e-3, 2e-3, 1e-3}) v.push_back(ux_l10_3_norm(simulate(u0, config(tau, 0.5))));
  for (double x : v) EXPECT_LT(x, 2.0 * std::sqrt(e0) + 1.0);
  EXPECT_NEAR(v[1] / v[2], 1.0, 0.05);
}
