#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <utility>

#include "fiberspin/errors.hpp"
#include "fiberspin/scalar_solver.hpp"
#include "oracles.hpp"

namespace fs = fiberspin;

namespace {

// Core radius giving the requested V for the default indices and wavelength.
fs::FiberSpec fiber_with_v(double v) {
  fs::FiberSpec f;
  const double na = std::sqrt(f.n_core * f.n_core - f.n_clad * f.n_clad);
  f.core_radius_um = v * f.wavelength_um / (2.0 * std::numbers::pi * na);
  return f;
}

std::set<std::pair<int, int>> solved_set(const fs::FiberSpec& f) {
  std::set<std::pair<int, int>> out;
  for (const auto& m : fs::solve_lp_modes(f, fs::kMaxSolverL, fs::kMaxSolverM)) out.insert({m.l, m.m});
  return out;
}

std::set<std::pair<int, int>> scanned_set(double v) {
  std::set<std::pair<int, int>> out;
  for (int l = 0; l <= fs::kMaxSolverL; ++l) {
    const int n = oracle::count_modes_by_scan(l, v);
    for (int m = 1; m <= std::min(n, fs::kMaxSolverM); ++m) out.insert({l, m});
  }
  return out;
}

}  // namespace

TEST(VNumber, DefaultFiber) {
  const fs::FiberSpec f;
  const double expected = 2.0 * std::numbers::pi * 5.0 / 1.55 * std::sqrt(1.46 * 1.46 - 1.45 * 1.45);
  EXPECT_NEAR(fs::v_number(f), expected, 1e-14);
  EXPECT_NEAR(fs::v_number(f), 3.4579, 1e-3);
}

TEST(VNumber, ZeroNumericalAperture) {
  fs::FiberSpec f;
  f.n_core = f.n_clad;
  EXPECT_EQ(fs::v_number(f), 0.0);
}

TEST(VNumber, LinearInRadiusInverseInWavelength) {
  fs::FiberSpec f;
  const double v = fs::v_number(f);
  f.core_radius_um *= 2.0;
  EXPECT_NEAR(fs::v_number(f), 2.0 * v, 1e-13);
  f.wavelength_um *= 4.0;
  EXPECT_NEAR(fs::v_number(f), 0.5 * v, 1e-13);
}

TEST(FiberSpec, ValidationAndWeakGuidance) {
  fs::FiberSpec bad;
  bad.n_core = 1.44;
  EXPECT_THROW(fs::validate(bad), fs::DomainError);
  bad = {};
  bad.core_radius_um = -1.0;
  EXPECT_THROW(fs::validate(bad), fs::DomainError);
  EXPECT_FALSE(fs::FiberSpec{}.weak_guidance_warning());
  fs::FiberSpec strong;
  strong.n_core = 1.6;
  strong.n_clad = 1.45;
  EXPECT_TRUE(strong.weak_guidance_warning());
}

TEST(Solver, SingleModeBelowLp11Cutoff) {
  const auto modes = fs::solve_lp_modes(fiber_with_v(2.0), 10, 5);
  ASSERT_EQ(modes.size(), 1u);
  EXPECT_EQ(modes[0].l, 0);
  EXPECT_EQ(modes[0].m, 1);
}

TEST(Solver, DefaultFiberSupportsLp01AndLp11Only) {
  const auto modes = fs::solve_lp_modes(fs::FiberSpec{}, 10, 5);
  const std::set<std::pair<int, int>> expected{{0, 1}, {1, 1}};
  EXPECT_EQ(solved_set(fs::FiberSpec{}), expected);
  for (const auto& m : modes) EXPECT_LT(m.l, 2);
}

TEST(Solver, RequestRestriction) {
  const auto modes = fs::solve_lp_modes(fiber_with_v(5.0), 0, 1);
  ASSERT_LE(modes.size(), 1u);
  ASSERT_EQ(modes.size(), 1u);
  EXPECT_EQ(modes[0].l, 0);
  EXPECT_EQ(modes[0].m, 1);
  EXPECT_THROW(fs::solve_lp_modes(fs::FiberSpec{}, 11, 1), fs::DomainError);
  EXPECT_THROW(fs::solve_lp_modes(fs::FiberSpec{}, 1, 6), fs::DomainError);
}

TEST(Solver, UnguidedRequestGivesEmptyList) {
  EXPECT_TRUE(fs::dispersion_roots(3, 3.0).empty());
  EXPECT_FALSE(fs::find_lp_mode(fs::FiberSpec{}, 2, 1).has_value());
}

TEST(Solver, MatchesBruteForceScanOracle) {
  for (double v : {2.0, 3.458, 5.0, 7.3, 11.0}) {
    EXPECT_EQ(solved_set(fiber_with_v(v)), scanned_set(v)) << "V=" << v;
  }
}

TEST(Solver, RootsSatisfyDispersionAndVSquared) {
  for (double v : {2.0, 3.458, 5.0, 9.0}) {
    const auto f = fiber_with_v(v);
    for (const auto& m : fs::solve_lp_modes(f, 10, 5)) {
      EXPECT_NEAR(m.u * m.u + m.w * m.w, v * v, 1e-10 * v * v);
      EXPECT_NEAR(oracle::dispersion_residual(m.l, v, m.u), 0.0, 1e-8) << "LP" << m.l << m.m;
      EXPECT_GT(m.n_eff, f.n_clad);
      EXPECT_LT(m.n_eff, f.n_core);
      EXPECT_NEAR(m.beta_per_um, 2.0 * std::numbers::pi * m.n_eff / f.wavelength_um, 1e-12);
    }
  }
}

TEST(Solver, EffectiveIndexDecreasesWithRadialOrder) {
  const auto f = fiber_with_v(9.0);
  for (int l = 0; l <= 3; ++l) {
    double prev = f.n_core;
    for (int m = 1; m <= 5; ++m) {
      const auto mode = fs::find_lp_mode(f, l, m);
      if (!mode) break;
      EXPECT_LT(mode->n_eff, prev);
      prev = mode->n_eff;
    }
  }
}

TEST(Solver, Lp01AtVTwoMatchesStandardLibraryBisection) {
  double lo = 1e-6, hi = 2.0 - 1e-9;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (oracle::dispersion_residual(0, 2.0, mid) < 0.0 ? lo : hi) = mid;
  }
  const auto mode = fs::find_lp_mode(fiber_with_v(2.0), 0, 1);
  ASSERT_TRUE(mode);
  EXPECT_NEAR(mode->u, 0.5 * (lo + hi), 1e-10);
}

TEST(RadialProfile, UnitAndContinuousAtCoreBoundary) {
  const auto f = fiber_with_v(5.0);
  const double a = f.core_radius_um;
  for (const auto& m : fs::solve_lp_modes(f, 10, 5)) {
    EXPECT_NEAR(fs::radial_profile(m, f, a), 1.0, 1e-15);
    const double inside = fs::radial_profile(m, f, a * (1.0 - 1e-14));
    const double outside = fs::radial_profile(m, f, a * (1.0 + 1e-14));
    EXPECT_NEAR(inside, outside, 1e-12) << "LP" << m.l << m.m;
  }
}

TEST(RadialProfile, VanishesOnAxisForNonzeroOrder) {
  const auto f = fiber_with_v(5.0);
  for (const auto& m : fs::solve_lp_modes(f, 10, 5)) {
    if (m.l >= 1) {
      EXPECT_EQ(fs::radial_profile(m, f, 0.0), 0.0);
    }
  }
}

TEST(RadialProfile, HalfRadiusMatchesSeriesOracle) {
  const fs::FiberSpec f;
  const auto mode = fs::find_lp_mode(f, 0, 1);
  ASSERT_TRUE(mode);
  const double expected = oracle::bessel_j_series(0, mode->u / 2) / oracle::bessel_j_series(0, mode->u);
  EXPECT_NEAR(fs::radial_profile(*mode, f, f.core_radius_um / 2), expected, 1e-9);
}

TEST(RadialProfile, CladdingTailDecaysMonotonically) {
  const auto f = fiber_with_v(5.0);
  const double a = f.core_radius_um;
  for (const auto& m : fs::solve_lp_modes(f, 10, 5)) {
    const fs::RadialProfile profile(m, f);
    double prev = std::abs(profile(2.0 * a));
    for (double r = 2.0 * a + 0.05; r < 8.0 * a; r += 0.05) {
      const double cur = std::abs(profile(r));
      EXPECT_LT(cur, prev) << "LP" << m.l << m.m << " r=" << r;
      prev = cur;
    }
    EXPECT_NEAR(profile(0.7 * a), fs::radial_profile(m, f, 0.7 * a), 1e-13);
  }
}
