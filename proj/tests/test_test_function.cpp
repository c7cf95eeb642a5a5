#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sgm/test_function.hpp"

using namespace sgm;
using oracle::kPi;

TEST(SmoothStep, EndValuesAndMonotone) {
  EXPECT_EQ(smooth_step(0, 0.0), 1.0);
  EXPECT_EQ(smooth_step(0, 1.0), 0.0);
  EXPECT_NEAR(smooth_step(0, 0.5), 0.5, 1e-14);
  double prev = 1.0;
  for (int i = 1; i < 1000; ++i) {
    const double v = smooth_step(0, i / 1000.0);
    EXPECT_LE(v, prev + 1e-15);
    prev = v;
  }
}

TEST(SmoothStep, DerivativesMatchFiniteDifferences) {
  for (int k = 0; k < 4; ++k) {
    for (double xi : {0.2, 0.41, 0.5, 0.77}) {
      const double h = 1e-5;
      const double fd = (smooth_step(k, xi + h) - smooth_step(k, xi - h)) / (2 * h);
      EXPECT_NEAR(smooth_step(k + 1, xi), fd, 1e-5 * (1 + std::abs(fd))) << k << " " << xi;
    }
  }
}

TEST(MakeCutoff, PlateauAndSupport) {
  const auto phi = make_cutoff(1.0, 0.5, 0.8, 0.1);
  EXPECT_EQ(phi.value(1.0, 0.5), 1.0);
  EXPECT_EQ(phi.value(1.3, 0.53), 1.0);
  EXPECT_EQ(phi.value(1.9, 0.5), 0.0);
  EXPECT_EQ(phi.value(1.0, 0.61), 0.0);
  EXPECT_EQ(phi.value(1.0 + 2 * kPi, 0.5), 1.0);
  for (double x = -1.0; x < 3.0; x += 0.01) {
    const double v = phi.value(x, 0.47);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(MakeCutoff, WrapsAroundTheTorus) {
  const auto phi = make_cutoff(0.1, 0.5, 0.5, 0.1);
  EXPECT_NEAR(phi.value(2 * kPi - 0.2, 0.5), phi.value(0.4, 0.5), 1e-14);
  EXPECT_GT(phi.value(2 * kPi - 0.2, 0.5), 0.0);
}

TEST(MakeCutoff, SpaceOnlyProfile) {
  const auto s = make_cutoff(2.0, 0.0, 0.6, 1.0, CutoffProfile::SpaceOnly);
  EXPECT_EQ(s.value(2.0, 100.0), 1.0);
  EXPECT_EQ(s.dt(2.2, 3.0), 0.0);
  EXPECT_EQ(s.dt_bound(), 0.0);
}

TEST(MakeCutoff, Errors) {
  EXPECT_THROW(make_cutoff(0, 0, kPi, 1), std::invalid_argument);
  EXPECT_THROW(make_cutoff(0, 0, 1, 0), std::invalid_argument);
  EXPECT_THROW(make_cutoff(0, 0, 1, 1, CutoffProfile::SpaceTime, 1.0), std::invalid_argument);
}

TEST(MakeCutoff, DerivativeBoundScalesInverselyWithRadius) {
  const auto a = make_cutoff(0, 0, 0.8, 1), b = make_cutoff(0, 0, 0.4, 1);
  EXPECT_NEAR(a.deriv_bounds()[1] / b.deriv_bounds()[1], 0.5, 0.05);
  for (int k = 0; k <= 4; ++k) EXPECT_NEAR(a.deriv_bounds()[k] / b.deriv_bounds()[k], std::pow(0.5, k), 1e-12);
}

TEST(MakeCutoff, BoundsSurviveFourTimesDenserSampling) {
  for (double r : {0.3, 1.1}) {
    const auto phi = make_cutoff(1.0, 0.0, r, 0.2);
    const auto c = TestFunction::profile_constants(phi.plateau());
    const int n = 4 * 2048 * 2;
    for (int k = 0; k <= 4; ++k) {
      double m = 0.0;
      for (int i = 0; i <= n; ++i) m = std::max(m, std::abs(phi.space(k, 1.0 - r + 2 * r * i / n)));
      EXPECT_LE(m, phi.deriv_bounds()[k]) << k;
      EXPECT_LE(m, c[k] * std::pow(r, -k)) << k;
    }
    double mt = 0.0;
    for (int i = 0; i <= n; ++i) mt = std::max(mt, std::abs(phi.time(1, -0.2 + 0.4 * i / n)));
    EXPECT_LE(mt, phi.dt_bound());
  }
}

TEST(MakeCutoff, SpatialDerivativesMatchFiniteDifferences) {
  const auto phi = make_cutoff(3.0, 1.0, 0.7, 0.1);
  for (int k = 0; k < 4; ++k) {
    for (double x : {2.45, 2.6, 3.4, 3.55}) {
      const double h = 1e-5;
      const double fd = (phi.space(k, x + h) - phi.space(k, x - h)) / (2 * h);
      EXPECT_NEAR(phi.space(k + 1, x), fd, 1e-4 * (1 + std::abs(fd))) << k << " " << x;
    }
  }
  const double h = 1e-6;
  EXPECT_NEAR(phi.dt(3.0, 1.07), (phi.value(3.0, 1.07 + h) - phi.value(3.0, 1.07 - h)) / (2 * h), 1e-4);
}
