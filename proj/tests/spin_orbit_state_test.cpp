#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "fiberspin/errors.hpp"
#include "fiberspin/spin_orbit_state.hpp"

namespace fs = fiberspin;
using fs::BellLabel;
using fs::complex;
using fs::Spin;
using fs::TwoQubitState;

namespace {

const double kH = 1.0 / std::numbers::sqrt2;

fs::FiberSpec v5_fiber() {
  fs::FiberSpec f;
  f.core_radius_um = 7.2306167;
  return f;
}

double toy_radial(double r) { return r * std::exp(-r * r / 20.0); }

const fs::GridSpec kGrid = fs::GridSpec::for_fiber(fs::FiberSpec{});

// Amplitudes of a polarization pattern on the four basis patterns, by an
// independent angular quadrature at the Jones-vector level (radial parts are
// shared and cancel after normalization).
TwoQubitState::Amplitudes project_pattern(const fs::ModeLabel& label, int l) {
  const int n = 1024;
  TwoQubitState::Amplitudes a{};
  for (int k = 0; k < 4; ++k) {
    const complex circ_y = k < 2 ? complex(0, 1) : complex(0, -1);
    const int q = (k % 2 == 0 ? 1 : -1) * l;
    complex acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const double phi = 2 * std::numbers::pi * j / n;
      const auto p = fs::vector_pattern(label, phi);
      const complex e = std::polar(1.0, q * phi);
      acc += std::conj(e) * p.x + std::conj(circ_y * e) * p.y;
    }
    a[k] = acc;
  }
  double n2 = 0.0;
  for (auto& v : a) n2 += std::norm(v);
  for (auto& v : a) v /= std::sqrt(n2);
  return a;
}

double distance_mod_phase(const TwoQubitState::Amplitudes& x, const TwoQubitState::Amplitudes& y) {
  complex ov = 0.0;
  for (int k = 0; k < 4; ++k) ov += std::conj(x[k]) * y[k];
  const complex ph = std::abs(ov) > 0 ? ov / std::abs(ov) : complex(1.0);
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(x[k] * ph - y[k]));
  return worst;
}

TwoQubitState random_state(std::mt19937_64& rng, int l) {
  std::normal_distribution<double> g;
  TwoQubitState::Amplitudes a;
  for (auto& v : a) v = {g(rng), g(rng)};
  return TwoQubitState::normalized(a, l);
}

TwoQubitState theta_state(double theta, int l = 2) {
  return TwoQubitState({std::cos(theta), 0.0, 0.0, std::sin(theta)}, l);
}

}  // namespace

TEST(TwoQubitState, NormCheckAndBasis) {
  EXPECT_THROW(TwoQubitState({1.0, 1.0, 0.0, 0.0}, 2), fs::DomainError);
  EXPECT_THROW(TwoQubitState({1.0, 0.0, 0.0, 0.0}, 0), fs::DomainError);
  EXPECT_THROW(TwoQubitState::normalized({0.0, 0.0, 0.0, 0.0}, 2), fs::DomainError);
  const auto s = TwoQubitState::basis(Spin::minus, -1, 3);
  EXPECT_EQ(s[fs::BasisIndex::mm], complex(1.0));
  EXPECT_EQ(fs::basis_name(1), "|+,-l>");
}

TEST(BellState, CatalogueAmplitudes) {
  const auto phi = fs::bell_state(BellLabel::PhiPlus, 2);
  const TwoQubitState::Amplitudes phi_expected{kH, 0.0, 0.0, kH};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(std::abs(phi[k] - phi_expected[k]), 0.0, 1e-15);

  const auto psi = fs::bell_state(BellLabel::PsiMinus, 2);
  const TwoQubitState::Amplitudes psi_expected{0.0, complex(0, kH), complex(0, -kH), 0.0};
  EXPECT_LT(distance_mod_phase(psi.amplitudes(), psi_expected), 1e-15);

  EXPECT_EQ(fs::bell_catalogue(1).size(), 2u);
  EXPECT_EQ(fs::bell_catalogue(3).size(), 4u);
  EXPECT_TRUE(fs::bell_catalogue(0).empty());
}

TEST(BellState, PsiAtOrderOneIsRejected) {
  EXPECT_THROW(fs::bell_state(BellLabel::PsiPlus, 1), fs::UnstablePairError);
  EXPECT_THROW(fs::bell_state(BellLabel::PsiMinus, 1), fs::UnstablePairError);
  EXPECT_THROW(fs::bell_vector_mode(BellLabel::PsiPlus, 1), fs::UnstablePairError);
  EXPECT_NO_THROW(fs::bell_state(BellLabel::PhiMinus, 1));
}

TEST(BellState, MutuallyOrthogonal) {
  for (int l : {2, 4}) {
    const auto cat = fs::bell_catalogue(l);
    for (auto a : cat)
      for (auto b : cat)
        EXPECT_NEAR(std::abs(fs::inner(fs::bell_state(a, l), fs::bell_state(b, l))), a == b ? 1.0 : 0.0, 1e-15);
  }
}

TEST(FieldToState, VectorModesGiveCatalogueAmplitudesGuided) {
  const auto fiber = v5_fiber();
  const auto grid = fs::GridSpec::for_fiber(fiber);
  for (int l : {1, 2}) {
    const fs::SpinOrbitBasis basis(l, 1, fiber, grid);
    for (auto label : fs::bell_catalogue(l)) {
      const auto mode = fs::bell_vector_mode(label, l);
      const auto state = fs::field_to_state(fs::vector_mode_field(mode, fiber, grid), basis);
      EXPECT_LT(fs::phase_aligned_distance(state, fs::bell_state(label, l)), 1e-9) << mode.name();
      EXPECT_LT(distance_mod_phase(state.amplitudes(), project_pattern(mode, l)), 1e-9) << mode.name();
      EXPECT_EQ(fs::identify_bell(state), label);
    }
  }
}

TEST(FieldToState, VectorModesGiveCatalogueAmplitudesSynthetic) {
  for (int l = 2; l <= 5; ++l) {
    const auto basis = fs::SpinOrbitBasis::synthetic(l, toy_radial, kGrid);
    for (auto label : fs::bell_catalogue(l)) {
      const auto mode = fs::bell_vector_mode(label, l);
      const auto state = fs::field_to_state(fs::synthesize_vector_mode(mode, toy_radial, kGrid), basis);
      EXPECT_LT(fs::phase_aligned_distance(state, fs::bell_state(label, l)), 1e-9) << mode.name();
      EXPECT_LT(distance_mod_phase(state.amplitudes(), project_pattern(mode, l)), 1e-9) << mode.name();
    }
  }
}

TEST(FieldToState, TmTeCombinationsAreNotCatalogued) {
  const auto fiber = v5_fiber();
  const auto grid = fs::GridSpec::for_fiber(fiber);
  const fs::SpinOrbitBasis basis(1, 1, fiber, grid);
  const auto tm = fs::field_to_state(fs::vector_mode_field(fs::ModeLabel::parse("TM0,1"), fiber, grid), basis);
  EXPECT_NEAR(fs::concurrence(tm), 1.0, 1e-9);
  EXPECT_FALSE(fs::identify_bell(tm).has_value());
}

TEST(FieldToState, BasisElementAndOutOfSubspace) {
  const fs::FiberSpec fiber;
  const fs::SpinOrbitBasis basis(1, 1, fiber, kGrid);
  const auto s = fs::field_to_state(fs::oam_mode_field(Spin::plus, 1, 1, fiber, kGrid), basis);
  EXPECT_NEAR(std::abs(s[0]), 1.0, 1e-12);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(std::abs(s[k]), 0.0, 1e-12);

  const auto synthetic = fs::SpinOrbitBasis::synthetic(2, toy_radial, kGrid);
  const auto he11 = fs::vector_mode_field(fs::ModeLabel::parse("HE1,1,even"), fiber, kGrid);
  try {
    fs::field_to_state(he11, synthetic);
    FAIL();
  } catch (const fs::OutOfSubspaceError& e) {
    EXPECT_NEAR(e.residual(), 1.0, 1e-9);
  }
}

TEST(StateToField, PhiPlusIsHeEvenAndBasisStateIsOamMode) {
  const auto fiber = v5_fiber();
  const auto grid = fs::GridSpec::for_fiber(fiber);
  const auto f = fs::state_to_field(fs::bell_state(BellLabel::PhiPlus, 2), fiber, grid);
  EXPECT_LT(fs::max_relative_deviation(f, fs::vector_mode_field(fs::ModeLabel::parse("HE3,1,even"), fiber, grid)),
            1e-9);
  const auto g = fs::state_to_field(TwoQubitState::basis(Spin::minus, -1, 2), fiber, grid);
  EXPECT_LT(fs::max_relative_deviation(g, fs::oam_mode_field(Spin::minus, -2, 1, fiber, grid)), 1e-15);
  EXPECT_THROW(fs::state_to_field(TwoQubitState::basis(Spin::plus, 1, 3), fs::FiberSpec{}, kGrid),
               fs::UnguidedModeError);
}

TEST(RoundTrip, SeededRandomStates) {
  std::mt19937_64 rng(20240611);
  for (int l = 1; l <= 3; ++l) {
    const auto basis = fs::SpinOrbitBasis::synthetic(l, toy_radial, kGrid);
    for (int trial = 0; trial < 100; ++trial) {
      const auto s = random_state(rng, l);
      const auto back = fs::field_to_state(fs::state_to_field(s, basis), basis);
      EXPECT_LT(fs::phase_aligned_distance(back, s), 1e-9) << "l=" << l << " trial=" << trial;
    }
  }
}

TEST(Concurrence, BellProductAndTheta) {
  for (auto b : fs::bell_catalogue(2)) EXPECT_NEAR(fs::concurrence(fs::bell_state(b, 2)), 1.0, 1e-12);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(fs::concurrence(TwoQubitState::basis(fs::basis_spin(k), fs::basis_oam_sign(k), 2)), 0.0);
  const double theta = std::numbers::pi / 6;
  EXPECT_NEAR(fs::concurrence(theta_state(theta)), 2.0 * std::abs(std::cos(theta) * std::sin(theta)), 1e-15);
  EXPECT_NEAR(fs::concurrence(theta_state(theta)), 0.8660, 1e-4);
}

TEST(Concurrence, InvariantUnderLocalPhases) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_state(rng, 2);
    auto a = s.amplitudes();
    const complex p1 = std::polar(1.0, 0.3 * trial), p2 = std::polar(1.0, -0.7 * trial);
    a[1] *= p2;
    a[2] *= p1;
    a[3] *= p1 * p2;
    EXPECT_NEAR(fs::concurrence(TwoQubitState(a, 2)), fs::concurrence(s), 1e-13);
  }
}

TEST(Schmidt, ExamplesAndSvdOracle) {
  auto phi = fs::schmidt_coefficients(fs::bell_state(BellLabel::PsiMinus, 3));
  EXPECT_NEAR(phi.first, kH, 1e-12);
  EXPECT_NEAR(phi.second, kH, 1e-12);
  auto prod = fs::schmidt_coefficients(TwoQubitState::basis(Spin::plus, -1, 2));
  EXPECT_NEAR(prod.first, 1.0, 1e-15);
  EXPECT_NEAR(prod.second, 0.0, 1e-15);
  auto th = fs::schmidt_coefficients(theta_state(std::numbers::pi / 6));
  EXPECT_NEAR(th.first, std::cos(std::numbers::pi / 6), 1e-12);
  EXPECT_NEAR(th.second, std::sin(std::numbers::pi / 6), 1e-12);

  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = random_state(rng, 2);
    Eigen::Matrix2cd m;
    m << s[0], s[1], s[2], s[3];
    const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::Matrix2cd>(m).singularValues();
    const auto sp = fs::schmidt_coefficients(s);
    EXPECT_NEAR(sp.first, sv(0), 1e-12);
    EXPECT_NEAR(sp.second, sv(1), 1e-12);
    EXPECT_NEAR(sp.first * sp.first + sp.second * sp.second, 1.0, 1e-12);
    EXPECT_NEAR(2.0 * sp.first * sp.second, fs::concurrence(s), 1e-12);
  }
}

TEST(Correlator, Examples) {
  const auto phi = fs::bell_state(BellLabel::PhiPlus, 2);
  EXPECT_NEAR(fs::correlator(phi, 0.0, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(fs::correlator(phi, 0.0, std::numbers::pi / 4), 0.0, 1e-15);
  EXPECT_NEAR(fs::correlator(TwoQubitState::basis(Spin::plus, 1, 2), 0.0, 0.0), 1.0, 1e-15);
  for (double a = 0.0; a < 3.0; a += 0.37)
    for (double b = 0.0; b < 3.0; b += 0.41) EXPECT_NEAR(fs::correlator(phi, a, b), std::cos(2 * (a - b)), 1e-14);
}

TEST(Chsh, ExamplesAndBounds) {
  const double pi = std::numbers::pi;
  const auto phi = fs::bell_state(BellLabel::PhiPlus, 2);
  EXPECT_NEAR(fs::chsh(phi, 0.0, pi / 4, pi / 8, 3 * pi / 8), 2.0 * std::numbers::sqrt2, 1e-12);
  // E(a,b) = cos 2(a - b) for Phi+, so these settings cancel pairwise
  EXPECT_NEAR(fs::chsh(phi, 0.0, pi / 4, pi / 8, -pi / 8), 0.0, 1e-12);
  for (double t : {0.0, 0.3, 1.1}) EXPECT_NEAR(fs::chsh(phi, t, t, t, t), 2.0, 1e-14);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, pi);
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = random_state(rng, 2);
    EXPECT_LE(std::abs(fs::chsh(s, u(rng), u(rng), u(rng), u(rng))), 2.0 * std::numbers::sqrt2 + 1e-12);
  }
}
