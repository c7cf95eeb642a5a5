#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "sgm/campanato.hpp"
#include "sgm/errors.hpp"
#include "sgm/solver.hpp"

using namespace sgm;

namespace {

constexpr double kPi = std::numbers::pi;

double sqrt_abs(double x) { return std::sqrt(std::abs(x)); }
double step(double x) { return x < 0 ? 0.0 : 1.0; }
double ident(double x) { return x; }
double cosine(double x) { return std::cos(x); }

SampledField random_line(std::mt19937_64& rng, std::size_t n, double a, double b) {
  std::normal_distribution<double> g;
  SampledField f;
  for (std::size_t i = 0; i < n; ++i) {
    f.x.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    f.values.push_back(g(rng));
  }
  return f;
}

SampledField random_plane(std::mt19937_64& rng, std::size_t nx, std::size_t nt, double xa, double xb, double ta,
                          double tb) {
  std::normal_distribution<double> g;
  SampledField f;
  f.t.clear();
  for (std::size_t i = 0; i < nx; ++i) f.x.push_back(xa + (xb - xa) * static_cast<double>(i) / (nx - 1));
  for (std::size_t j = 0; j < nt; ++j) f.t.push_back(ta + (tb - ta) * static_cast<double>(j) / (nt - 1));
  for (std::size_t k = 0; k < nx * nt; ++k) f.values.push_back(g(rng));
  return f;
}

// Gauss-Legendre on [-1, 1] by Newton on P_n.
void gl(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0);
  w.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5)), dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2 / ((1 - z * z) * dp * dp);
  }
}

// Pieces of [a, b] on which the linear interpolant is a single line.
std::vector<double> breaks(const std::vector<double>& xs, double a, double b) {
  std::vector<double> out{a};
  for (double x : xs)
    if (x > a && x < b) out.push_back(x);
  out.push_back(b);
  return out;
}

double interp(const SampledField& f, double x) {
  const auto it = std::upper_bound(f.x.begin(), f.x.end(), x);
  const std::size_t i = std::min<std::size_t>(std::max<long>(it - f.x.begin() - 1, 0), f.x.size() - 2);
  const double s = (x - f.x[i]) / (f.x[i + 1] - f.x[i]);
  return (1 - s) * f.values[i] + s * f.values[i + 1];
}

// Mean and p = 3 oscillation of the linear interpolant, exact: every piece is split at
// the zero of f - mean so |f - mean|^3 is a cubic there.
AnisoMean exact_line(const SampledField& f, double c, double r) {
  std::vector<double> gx, gw;
  gl(6, gx, gw);
  const auto br = breaks(f.x, c - r, c + r);
  double integral = 0;
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    integral += 0.5 * (br[k + 1] - br[k]) * (interp(f, br[k]) + interp(f, br[k + 1]));
  }
  const double m = integral / (2 * r);
  double osc = 0;
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    const double fa = interp(f, br[k]) - m, fb = interp(f, br[k + 1]) - m;
    std::vector<double> sub{br[k], br[k + 1]};
    if (fa * fb < 0) sub.insert(sub.begin() + 1, br[k] + (br[k + 1] - br[k]) * fa / (fa - fb));
    for (std::size_t s = 0; s + 1 < sub.size(); ++s) {
      const double h = 0.5 * (sub[s + 1] - sub[s]), mid = 0.5 * (sub[s + 1] + sub[s]);
      for (int q = 0; q < 6; ++q) osc += h * gw[q] * std::pow(std::abs(interp(f, mid + h * gx[q]) - m), 3);
    }
  }
  return {m, std::cbrt(osc / (2 * r))};
}

double bilinear(const SampledField& f, double x, double t) {
  const auto ix = std::upper_bound(f.x.begin(), f.x.end(), x);
  const auto it = std::upper_bound(f.t.begin(), f.t.end(), t);
  const std::size_t i = std::min<std::size_t>(std::max<long>(ix - f.x.begin() - 1, 0), f.x.size() - 2);
  const std::size_t j = std::min<std::size_t>(std::max<long>(it - f.t.begin() - 1, 0), f.t.size() - 2);
  const double s = (x - f.x[i]) / (f.x[i + 1] - f.x[i]), u = (t - f.t[j]) / (f.t[j + 1] - f.t[j]);
  return (1 - s) * (1 - u) * f.at(i, j) + s * (1 - u) * f.at(i + 1, j) + (1 - s) * u * f.at(i, j + 1) +
         s * u * f.at(i + 1, j + 1);
}

// Mean and p = 2 oscillation of the bilinear interpolant: the integrands are
// polynomials of degree <= 2 per variable on each cell, so 4 x 4 nodes are exact.
AnisoMean exact_plane(const SampledField& f, const AnisotropicCylinder& q) {
  std::vector<double> gx, gw;
  gl(4, gx, gw);
  const double h = std::pow(q.r, q.alpha);
  const auto bx = breaks(f.x, q.x - q.r, q.x + q.r), bt = breaks(f.t, q.y - h, q.y + h);
  auto integrate = [&](auto&& g) {
    double acc = 0;
    for (std::size_t a = 0; a + 1 < bx.size(); ++a) {
      for (std::size_t b = 0; b + 1 < bt.size(); ++b) {
        const double hx = 0.5 * (bx[a + 1] - bx[a]), mx = 0.5 * (bx[a + 1] + bx[a]);
        const double ht = 0.5 * (bt[b + 1] - bt[b]), mt = 0.5 * (bt[b + 1] + bt[b]);
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) acc += hx * ht * gw[i] * gw[j] * g(mx + hx * gx[i], mt + ht * gx[j]);
      }
    }
    return acc;
  };
  const double vol = 4 * q.r * h;
  const double m = integrate([&](double x, double t) { return bilinear(f, x, t); }) / vol;
  const double v = integrate([&](double x, double t) {
    const double d = bilinear(f, x, t) - m;
    return d * d;
  });
  return {m, std::sqrt(v / vol)};
}

std::vector<double> halving(double top, int count) {
  std::vector<double> r;
  for (int k = 0; k < count; ++k) r.push_back(top * std::pow(0.5, k));
  return r;
}

CampanatoGrids line_grids(double a, double b, std::vector<double> radii, std::size_t nz = 41) {
  CampanatoGrids g;
  g.r = std::move(radii);
  for (std::size_t i = 0; i < nz; ++i) g.z.push_back({a + (b - a) * static_cast<double>(i) / (nz - 1), 0.0});
  return g;
}

CampanatoGrids relative_grids(std::vector<double> radii) {
  CampanatoGrids g;
  g.r = std::move(radii);
  g.relative_step = 0.25;
  return g;
}

}  // namespace

TEST(AnisotropicCylinder, DimensionAndVolume) {
  AnisotropicCylinder q{1, 1, 4, 0.0, 0.0, 0.5};
  EXPECT_EQ(q.homogeneous_dim(), 5);
  EXPECT_NEAR(q.volume(), 4 * std::pow(0.5, 5), 1e-15);
  q.n2 = 0;
  EXPECT_EQ(q.homogeneous_dim(), 1);
  EXPECT_NEAR(q.volume(), 1.0, 1e-15);
}

TEST(AnisoMean, ConstantField) {
  SampledField f = sample_line(-1, 1, 65, [](double) { return 2.5; });
  const auto m = aniso_mean(f, cylinder_for(f, 0.1, 0, 0.4), 3);
  EXPECT_NEAR(m.mean, 2.5, 1e-14);
  EXPECT_NEAR(m.p_oscillation, 0.0, 1e-14);
}

TEST(AnisoMean, LinearFieldOscillationIsHalfRadius) {
  const auto f = sample_line(-1, 1, 257, ident);
  for (double r : {0.5, 0.2, 0.05}) {
    const auto m = aniso_mean(f, cylinder_for(f, 0.3, 0, r), 1);
    EXPECT_NEAR(m.mean, 0.3, 1e-13);
    EXPECT_NEAR(m.p_oscillation, r / 2, 1e-13);
  }
}

TEST(AnisoMean, MatchesExactLineQuadrature) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> c(-0.5, 0.5), rad(0.06, 0.45);
  for (int trial = 0; trial < 40; ++trial) {
    const auto f = random_line(rng, 129, -1, 1);
    const double x = c(rng), r = rad(rng);
    const auto got = aniso_mean(f, cylinder_for(f, x, 0, r), 3);
    const auto want = exact_line(f, x, r);
    EXPECT_NEAR(got.mean, want.mean, 1e-7);
    EXPECT_NEAR(got.p_oscillation, want.p_oscillation, 1e-7);
  }
}

TEST(AnisoMean, MatchesExactPlaneQuadrature) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> c(-0.3, 0.3), rad(0.3, 0.6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_plane(rng, 65, 129, -1, 1, -0.2, 0.2);
    const auto q = cylinder_for(f, c(rng), c(rng) / 10, rad(rng));
    const auto got = aniso_mean(f, q, 2);
    const auto want = exact_plane(f, q);
    EXPECT_NEAR(got.mean, want.mean, 1e-7);
    EXPECT_NEAR(got.p_oscillation, want.p_oscillation, 1e-7);
  }
}

TEST(AnisoMean, PeriodicWrapMatchesShiftedField) {
  const std::size_t n = 64;
  SampledField f, g;
  f.periodic_x = g.periodic_x = true;
  f.period = g.period = 2 * kPi;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = 2 * kPi * static_cast<double>(i) / n;
    f.x.push_back(x);
    g.x.push_back(x);
    f.values.push_back(std::sin(3 * x) + std::cos(x));
    g.values.push_back(std::sin(3 * (x + kPi)) + std::cos(x + kPi));
  }
  const auto a = aniso_mean(f, cylinder_for(f, 0.1, 0, 0.7), 3);
  const auto b = aniso_mean(g, cylinder_for(g, 0.1 + kPi, 0, 0.7), 3);
  EXPECT_NEAR(a.mean, b.mean, 1e-13);
  EXPECT_NEAR(a.p_oscillation, b.p_oscillation, 1e-13);
}

TEST(AnisoMean, Errors) {
  const auto f = sample_line(-1, 1, 33, ident);
  EXPECT_THROW(aniso_mean(f, cylinder_for(f, 0.9, 0, 0.2), 3), OutsideDomain);
  EXPECT_THROW(aniso_mean(f, cylinder_for(f, 0.0, 0, 0.05), 3), UnderResolved);
  EXPECT_THROW(aniso_mean(f, cylinder_for(f, 0.0, 0, 0.3), 0.5), std::invalid_argument);
  auto q = cylinder_for(f, 0.0, 0, 0.3);
  q.n2 = 1;
  EXPECT_THROW(aniso_mean(f, q, 3), std::invalid_argument);
  std::mt19937_64 rng(1);
  const auto p = random_plane(rng, 33, 33, -1, 1, -1, 1);
  EXPECT_THROW(aniso_mean(p, cylinder_for(p, 0, 0, 0.3, 4), 3), UnderResolved);
  EXPECT_THROW(aniso_mean(p, cylinder_for(p, 0, 0.95, 0.4, 1), 3), OutsideDomain);
}

TEST(AverageComparison, ConstantAndThetaOne) {
  const auto c = sample_line(-1, 1, 65, [](double) { return -1.0; });
  const auto a = average_comparison_check(c, cylinder_for(c, 0, 0, 0.5), 0.5, 3);
  EXPECT_NEAR(a.lhs, 0.0, 1e-14);
  EXPECT_NEAR(a.rhs, 0.0, 1e-14);
  std::mt19937_64 rng(3);
  const auto f = random_line(rng, 65, -1, 1);
  const auto b = average_comparison_check(f, cylinder_for(f, 0, 0, 0.5), 1.0, 3);
  EXPECT_NEAR(b.lhs, 0.0, 1e-14);
  EXPECT_GT(b.rhs, 0.0);
  EXPECT_THROW(average_comparison_check(f, cylinder_for(f, 0, 0, 0.5), 0.0, 3), std::invalid_argument);
}

TEST(AverageComparison, HoldsOnRandomInstances) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0, 1);
  int checked = 0;
  while (checked < 500) {
    const bool plane = checked % 2 == 1;
    const int alpha = std::array{1, 2, 4}[checked % 3];
    const double p = 1 + 3 * u(rng);
    const auto f = plane ? random_plane(rng, 97, 97, 0, 2, 0, 2) : random_line(rng, 97, 0, 2);
    const double r = 0.2 + 0.75 * u(rng);
    const double h = plane ? std::pow(r, alpha) : 0.0;
    const double x = r + (2 - 2 * r) * u(rng);
    const double t = plane ? h + (2 - 2 * h) * u(rng) : 0.0;
    const double theta = u(rng);
    try {
      const auto res = average_comparison_check(f, cylinder_for(f, x, t, r, alpha), theta, p);
      EXPECT_LE(res.lhs, res.rhs + 1e-9);
      ++checked;
    } catch (const UnderResolved&) {
    }
  }
}

TEST(CampanatoSeminorm, ConstantIsZero) {
  const auto f = sample_line(-1, 1, 129, [](double) { return 4.0; });
  const auto g = line_grids(-1, 1, halving(0.5, 5));
  EXPECT_NEAR(campanato_seminorm(f, full_region(f), 3, 0.7, g), 0.0, 1e-14);
}

TEST(CampanatoSeminorm, LinearFieldIsHalf) {
  const auto f = sample_line(-1, 1, 513, ident);
  const auto g = line_grids(-1, 1, halving(0.5, 6));
  EXPECT_NEAR(campanato_seminorm(f, full_region(f), 1, 1, g), 0.5, 1e-12);
}

TEST(CampanatoSeminorm, GridErrors) {
  const auto f = sample_line(-1, 1, 129, ident);
  EXPECT_THROW(campanato_seminorm(f, full_region(f), 3, 1, CampanatoGrids{}, 4), std::invalid_argument);
  EXPECT_THROW(campanato_seminorm(f, full_region(f), 3, 1, line_grids(-1, 1, {0.5, 0.1}), 4),
               std::invalid_argument);
}

TEST(CampanatoSeminorm, SqrtAbsFiniteAtHalfGrowingAbove) {
  const auto f = sample_line(-1, 1, 8193, sqrt_abs);
  const auto reg = full_region(f);
  std::vector<double> m_half, m_over;
  for (int count = 4; count <= 8; ++count) {
    const auto g = relative_grids(halving(0.5, count));
    m_half.push_back(campanato_seminorm(f, reg, 3, 0.5, g));
    m_over.push_back(campanato_seminorm(f, reg, 3, 0.6, g));
  }
  for (std::size_t k = 1; k < m_half.size(); ++k) {
    EXPECT_LT(m_half[k], m_half[k - 1] * 1.02);
    // one more halving: r^-0.1 grows by 2^0.1
    EXPECT_NEAR(m_over[k] / m_over[k - 1], std::pow(2.0, 0.1), 0.02);
  }
}

TEST(CampanatoSeminorm, MonotoneInRegion) {
  std::mt19937_64 rng(8);
  const auto f = random_line(rng, 257, -1, 1);
  const auto g = line_grids(-1, 1, halving(0.25, 5), 81);
  double prev = 0;
  for (double w : {0.4, 0.6, 0.8, 1.0}) {
    const double m = campanato_seminorm(f, Region{-w, w, 0, 0}, 3, 0.3, g);
    EXPECT_GE(m, prev);
    prev = m;
  }
}

TEST(HolderFit, SqrtAbs) {
  const auto f = sample_line(-1, 1, 8193, sqrt_abs);
  const auto reg = full_region(f);
  const auto fit = holder_fit(f, reg, 3, default_grids(f, reg));
  EXPECT_NEAR(fit.beta_hat, 0.5, 0.05);
  EXPECT_TRUE(fit.holder);
  EXPECT_GT(fit.M_hat, 0.0);
  EXPECT_LT(fit.c_measured, 10.0);
  EXPECT_GT(fit.c_measured, 0.0);
}

TEST(HolderFit, Cosine) {
  const auto f = sample_line(-kPi, kPi, 4097, cosine);
  const auto reg = full_region(f);
  const auto fit = holder_fit(f, reg, 3, default_grids(f, reg));
  EXPECT_NEAR(fit.beta_hat, 1.0, 0.05);
  EXPECT_TRUE(fit.holder);
  EXPECT_TRUE(fit.warnings.empty());
}

TEST(HolderFit, StepIsFlagged) {
  const auto f = sample_line(-1, 1, 4097, step);
  const auto reg = full_region(f);
  const auto fit = holder_fit(f, reg, 3, default_grids(f, reg));
  EXPECT_LT(fit.beta_hat, kHolderSlopeFloor);
  EXPECT_FALSE(fit.holder);
  EXPECT_FALSE(fit.warnings.empty());
}

TEST(HolderFit, TimeConstantMatchesSpaceFit) {
  const auto line = sample_line(-1, 1, 1025, sqrt_abs);
  for (int alpha : {1, 2}) {
    SampledField plane;
    plane.x = line.x;
    plane.t.clear();
    for (std::size_t j = 0; j < 769; ++j) plane.t.push_back(-0.3 + 0.6 * j / 768);
    for (std::size_t j = 0; j < plane.t.size(); ++j) plane.values.insert(plane.values.end(), line.values.begin(), line.values.end());
    CampanatoGrids gl = line_grids(-1, 1, halving(0.25, 3)), gp = gl;
    for (auto& z : gp.z) z.t = 0.0;
    const auto a = holder_fit(line, full_region(line), 3, gl, alpha);
    const auto b = holder_fit(plane, full_region(plane), 3, gp, alpha);
    EXPECT_NEAR(a.beta_hat, b.beta_hat, 1e-9);
    EXPECT_NEAR(a.M_hat, b.M_hat, 1e-9 * a.M_hat);
  }
}

TEST(HolderFit, ParabolicRescalingInvariant) {
  auto field = [](double lambda) {
    SampledField f;
    f.t.clear();
    for (std::size_t i = 0; i < 65; ++i) f.x.push_back((-1 + 2.0 * i / 64) / lambda);
    for (std::size_t j = 0; j < 4001; ++j) f.t.push_back((-0.125 + 0.25 * j / 4000) / std::pow(lambda, 4));
    for (double t : f.t)
      for (double x : f.x) f.values.push_back(std::sqrt(std::abs(lambda * x)) + std::cbrt(lambda * lambda * lambda * lambda * t));
    return f;
  };
  const auto f = field(1), g = field(2);
  const auto gf = default_grids(f, full_region(f)), gg = default_grids(g, full_region(g));
  ASSERT_EQ(gf.r.size(), gg.r.size());
  ASSERT_GE(gf.r.size(), 3u);
  const auto a = holder_fit(f, full_region(f), 3, gf);
  const auto b = holder_fit(g, full_region(g), 3, gg);
  EXPECT_NEAR(a.beta_hat, b.beta_hat, 1e-3);
}

TEST(SampledField, CsvRoundTrip) {
  std::stringstream ss("x,t,value\n0,0,1\n1,0,2\n0,1,3\n1,1,4\n");
  const auto f = read_field_csv(ss);
  ASSERT_EQ(f.x.size(), 2u);
  ASSERT_EQ(f.t.size(), 2u);
  EXPECT_EQ(f.at(1, 0), 2.0);
  EXPECT_EQ(f.at(0, 1), 3.0);
  std::stringstream missing("0,0,1\n1,0,2\n0,1,3\n");
  EXPECT_THROW(read_field_csv(missing), BadInput);
  std::stringstream junk("0,0,1\n1,abc,2\n");
  EXPECT_THROW(read_field_csv(junk), BadInput);
}

TEST(SampledField, FromTrajectory) {
  SolverConfig cfg;
  cfg.tau = 1e-3;
  cfg.t_end = 0.01;
  const auto u0 = SpectralField::from_function(32, [](double x) { return 0.2 * std::cos(x); });
  const auto traj = simulate(u0, cfg);
  const auto f = field_from_trajectory(traj);
  EXPECT_TRUE(f.periodic_x);
  EXPECT_EQ(f.x.size(), 32u);
  EXPECT_EQ(f.t.size(), traj.size());
  EXPECT_NO_THROW(f.validate());
  EXPECT_DOUBLE_EQ(f.at(5, 3), traj.frame(3).u.samples()[5]);
}
