#pragma once

// CHSH optimization over real-plane analyzer settings.
//
// With A(t) = cos 2t Z + sin 2t X the correlator is bilinear,
//     E(alpha, beta) = u(alpha)^T M u(beta),  u(t) = (cos 2t, sin 2t),
// where M is the Z/X correlation matrix of the state. Holding three settings
// fixed, S is maximized over the fourth in closed form, which makes
// coordinate ascent from the best grid point converge quickly.

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "spin_orbit_state.hpp"

namespace fiberspin {

struct ChshSettings {
  double a = 0.0;
  double a_prime = 0.0;
  double b = 0.0;
  double b_prime = 0.0;
};

struct ChshOptimum {
  ChshSettings settings;
  double s_grid = 0.0;  // best |S| on the settings grid
  double s = 0.0;       // |S| after refinement
  int grid_points = 0;  // per angle
};

inline constexpr double kClassicalChshBound = 2.0;

/// Angles k pi / n, k = 0..n-1 (the analyzers have period pi).
inline std::vector<double> chsh_angles(int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = k * std::numbers::pi / n;
  return out;
}

/// E(angles[i], angles[j]) for every pair, row-major.
inline std::vector<double> correlator_table(const TwoQubitState& s, const std::vector<double>& angles) {
  const std::size_t n = angles.size();
  std::vector<double> table(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) table[i * n + j] = correlator(s, angles[i], angles[j]);
  return table;
}

/// Largest |S| over the n^4 settings grid. S separates into
/// (E(a,b) + E(a',b)) + (E(a',b') - E(a,b')), so each (a, a') pair is
/// maximized over b and b' independently.
inline ChshOptimum chsh_grid_search(const TwoQubitState& s, int n = 64) {
  const auto angles = chsh_angles(n);
  const auto table = correlator_table(s, angles);
  auto at = [&](int i, int j) { return table[static_cast<std::size_t>(i) * n + j]; };

  ChshOptimum best;
  best.grid_points = n;
  best.s_grid = -1.0;
  for (int ia = 0; ia < n; ++ia) {
    for (int iap = 0; iap < n; ++iap) {
      int bmax = 0, bmin = 0, bpmax = 0, bpmin = 0;
      double xmax = -1e300, xmin = 1e300, ymax = -1e300, ymin = 1e300;
      for (int j = 0; j < n; ++j) {
        const double x = at(ia, j) + at(iap, j);
        const double y = at(iap, j) - at(ia, j);
        if (x > xmax) { xmax = x; bmax = j; }
        if (x < xmin) { xmin = x; bmin = j; }
        if (y > ymax) { ymax = y; bpmax = j; }
        if (y < ymin) { ymin = y; bpmin = j; }
      }
      if (xmax + ymax > best.s_grid) {
        best.s_grid = xmax + ymax;
        best.settings = {angles[ia], angles[iap], angles[bmax], angles[bpmax]};
      }
      if (-(xmin + ymin) > best.s_grid) {
        best.s_grid = -(xmin + ymin);
        best.settings = {angles[ia], angles[iap], angles[bmin], angles[bpmin]};
      }
    }
  }
  best.s = best.s_grid;
  return best;
}

namespace detail {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

inline Vec2 unit(double t) { return {std::cos(2.0 * t), std::sin(2.0 * t)}; }

// Angle t with u(t) parallel to v; keeps `current` if v vanishes.
inline double angle_of(const Vec2& v, double current) {
  if (std::hypot(v[0], v[1]) < 1e-300) return current;
  return 0.5 * std::atan2(v[1], v[0]);
}

inline Vec2 apply(const Mat2& m, const Vec2& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

inline Vec2 apply_transposed(const Mat2& m, const Vec2& v) {
  return {m[0][0] * v[0] + m[1][0] * v[1], m[0][1] * v[0] + m[1][1] * v[1]};
}

}  // namespace detail

/// Z/X correlation matrix M[i][j] = <sigma_i (x) sigma_j>, i, j in {Z, X}.
inline detail::Mat2 correlation_matrix(const TwoQubitState& s) {
  const double q = std::numbers::pi / 4.0;
  return {{{correlator(s, 0.0, 0.0), correlator(s, 0.0, q)},
           {correlator(s, q, 0.0), correlator(s, q, q)}}};
}

/// Grid search followed by exact coordinate ascent on |S|.
inline ChshOptimum maximize_chsh(const TwoQubitState& s, int n = 64) {
  using detail::Vec2;
  ChshOptimum best = chsh_grid_search(s, n);
  const auto m = correlation_matrix(s);
  auto& st = best.settings;
  const double sign =
      chsh(s, st.a, st.a_prime, st.b, st.b_prime) >= 0.0 ? 1.0 : -1.0;
  auto scaled = [sign](Vec2 v) { return Vec2{sign * v[0], sign * v[1]}; };

  double value = sign * chsh(s, st.a, st.a_prime, st.b, st.b_prime);
  for (int sweep = 0; sweep < 200; ++sweep) {
    const Vec2 vb = detail::unit(st.b), vbp = detail::unit(st.b_prime);
    st.a = detail::angle_of(scaled(detail::apply(m, {vb[0] - vbp[0], vb[1] - vbp[1]})), st.a);
    st.a_prime = detail::angle_of(scaled(detail::apply(m, {vb[0] + vbp[0], vb[1] + vbp[1]})), st.a_prime);
    const Vec2 ua = detail::unit(st.a), uap = detail::unit(st.a_prime);
    st.b = detail::angle_of(scaled(detail::apply_transposed(m, {ua[0] + uap[0], ua[1] + uap[1]})), st.b);
    st.b_prime =
        detail::angle_of(scaled(detail::apply_transposed(m, {uap[0] - ua[0], uap[1] - ua[1]})), st.b_prime);
    const double next = sign * chsh(s, st.a, st.a_prime, st.b, st.b_prime);
    const bool stalled = next - value < 1e-15;
    value = std::max(value, next);
    if (stalled) break;
  }
  best.s = std::max(value, best.s_grid);
  return best;
}

}  // namespace fiberspin
