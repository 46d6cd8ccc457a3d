#pragma once

// Weak-guidance scalar (LP) modes of a step-index fiber.
//
// LP_lm modes are the roots u in (0, V) of
//     u J_{l+1}(u) / J_l(u) = w K_{l+1}(w) / K_l(w),   w = sqrt(V^2 - u^2).
// The left side has poles at the zeros of J_l and increases on each branch, so
// every branch holds at most one root and it is bracketed by the branch ends.

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bessel.hpp"
#include "errors.hpp"

namespace fiberspin {

inline constexpr double kWeakGuidanceContrast = 0.05;

/// Step-index fiber. Lengths in micrometres.
struct FiberSpec {
  double core_radius_um = 5.0;
  double n_core = 1.46;
  double n_clad = 1.45;
  double wavelength_um = 1.55;

  double relative_index_contrast() const { return (n_core - n_clad) / n_core; }

  /// True when the index contrast is large enough that the scalar LP model is
  /// questionable. Evaluation still proceeds.
  bool weak_guidance_warning() const { return relative_index_contrast() >= kWeakGuidanceContrast; }

  friend bool operator==(const FiberSpec&, const FiberSpec&) = default;
};

/// Throws DomainError unless the fiber is physical and guiding.
inline void validate(const FiberSpec& fiber) {
  auto fail = [](const std::string& what) { throw DomainError("invalid fiber: " + what); };
  if (!(fiber.core_radius_um > 0.0) || !std::isfinite(fiber.core_radius_um))
    fail("core radius must be positive");
  if (!(fiber.wavelength_um > 0.0) || !std::isfinite(fiber.wavelength_um))
    fail("wavelength must be positive");
  if (!(fiber.n_core > 1.0) || !(fiber.n_clad > 1.0)) fail("indices must exceed 1");
  if (!(fiber.n_core > fiber.n_clad)) fail("n_core must exceed n_clad");
}

/// Normalized frequency V = (2 pi a / lambda) sqrt(n_core^2 - n_clad^2).
inline double v_number(const FiberSpec& fiber) {
  const double na2 = fiber.n_core * fiber.n_core - fiber.n_clad * fiber.n_clad;
  return 2.0 * std::numbers::pi * fiber.core_radius_um / fiber.wavelength_um *
         std::sqrt(std::max(na2, 0.0));
}

/// A solved LP_lm mode. The radial order m counts roots of the dispersion
/// relation in increasing u, so n_eff (and beta) strictly decrease with m.
struct ScalarMode {
  int l = 0;
  int m = 1;
  double u = 0.0;
  double w = 0.0;
  double n_eff = 0.0;
  double beta_per_um = 0.0;  // rad/um; photon z-momentum is hbar * beta
};

/// u J_{l+1}(u)/J_l(u) - w K_{l+1}(w)/K_l(w) with w = sqrt(V^2 - u^2).
inline double dispersion_residual(int l, double v, double u) {
  using special::bessel_j;
  using special::bessel_k;
  const double w = std::sqrt(std::max(v * v - u * u, 0.0));
  const double core = u * bessel_j(l + 1, u) / bessel_j(l, u);
  const double clad = w * bessel_k(l + 1, w) / bessel_k(l, w);
  return core - clad;
}

namespace detail {

// Positive zeros of J_l below `limit`, by sign-change scan and bisection.
inline std::vector<double> bessel_j_zeros_below(int l, double limit) {
  std::vector<double> zeros;
  constexpr double kStep = 0.02;  // zeros of J_l are at least ~pi apart
  double x0 = l == 0 ? kStep : std::max(kStep, static_cast<double>(l));
  double f0 = special::bessel_j(l, x0);
  while (x0 < limit) {
    const double x1 = x0 + kStep;
    const double f1 = special::bessel_j(l, x1);
    if (f0 == 0.0) {
      zeros.push_back(x0);
    } else if ((f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) {
      double lo = x0, hi = x1, flo = f0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = special::bessel_j(l, mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      const double z = 0.5 * (lo + hi);
      if (z < limit) zeros.push_back(z);
    }
    x0 = x1;
    f0 = f1;
  }
  return zeros;
}

inline double bisect_dispersion(int l, double v, double lo, double hi) {
  double flo = dispersion_residual(l, v, lo);
  double fhi = dispersion_residual(l, v, hi);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = dispersion_residual(l, v, mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
    if (hi - lo < 1e-15 * hi) break;
  }
  if (hi - lo >= 1e-12) {
    std::ostringstream os;
    os << "dispersion root for l=" << l << " did not converge in bracket [" << lo << ", "
       << hi << "]";
    throw SolverError(os.str());
  }
  return std::abs(flo) <= std::abs(fhi) ? lo : hi;
}

}  // namespace detail

inline constexpr double kCutoffExclusion = 1e-9;
inline constexpr int kMaxSolverL = 10;
inline constexpr int kMaxSolverM = 5;

/// Roots u of the LP_l dispersion relation in increasing order.
inline std::vector<double> dispersion_roots(int l, double v) {
  std::vector<double> roots;
  const double u_end = v - kCutoffExclusion;
  if (!(u_end > 0.0)) return roots;

  // Branch boundaries: 0, zeros of J_l below V, and V itself.
  std::vector<double> edges{0.0};
  for (double z : detail::bessel_j_zeros_below(l, u_end)) edges.push_back(z);
  edges.push_back(u_end);

  constexpr double kPoleOffset = 1e-9;
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    const bool left_is_pole = b > 0;
    const bool right_is_pole = b + 2 < edges.size();
    const double lo = edges[b] + (left_is_pole ? kPoleOffset : 1e-12 * v + 1e-300);
    const double hi = edges[b + 1] - (right_is_pole ? kPoleOffset : 0.0);
    if (!(hi > lo)) continue;
    const double flo = dispersion_residual(l, v, lo);
    const double fhi = dispersion_residual(l, v, hi);
    if (flo < 0.0 && fhi > 0.0) roots.push_back(detail::bisect_dispersion(l, v, lo, hi));
  }
  return roots;
}

/// Number of guided LP_l modes found by scanning the dispersion residual at
/// `samples` evenly spaced points of (0, V). Roots are the - to + crossings;
/// the + to - crossings are the poles at zeros of J_l.
inline int count_roots_by_scan(int l, double v, int samples = 10000) {
  int count = 0;
  double prev = 0.0;
  bool have_prev = false;
  for (int i = 0; i < samples; ++i) {
    const double u = v * (i + 0.5) / samples;
    const double g = dispersion_residual(l, v, u);
    if (!std::isfinite(g)) {
      have_prev = false;
      continue;
    }
    if (have_prev && prev < 0.0 && g > 0.0) ++count;
    prev = g;
    have_prev = true;
  }
  return count;
}

namespace detail {

inline ScalarMode make_mode(const FiberSpec& fiber, double v, int l, int m, double u) {
  const double k0 = 2.0 * std::numbers::pi / fiber.wavelength_um;
  const double na2 = fiber.n_core * fiber.n_core - fiber.n_clad * fiber.n_clad;
  ScalarMode mode;
  mode.l = l;
  mode.m = m;
  mode.u = u;
  mode.w = std::sqrt(v * v - u * u);
  const double b = u / v;
  mode.n_eff = std::sqrt(fiber.n_core * fiber.n_core - b * b * na2);
  mode.beta_per_um = k0 * mode.n_eff;
  return mode;
}

}  // namespace detail

/// Every guided LP_lm with l <= l_max and m <= m_max, ordered by (l, m).
inline std::vector<ScalarMode> solve_lp_modes(const FiberSpec& fiber, int l_max, int m_max) {
  validate(fiber);
  if (l_max < 0 || l_max > kMaxSolverL || m_max < 1 || m_max > kMaxSolverM) {
    throw DomainError("solve_lp_modes: require 0 <= l_max <= 10 and 1 <= m_max <= 5");
  }
  const double v = v_number(fiber);
  std::vector<ScalarMode> modes;
  for (int l = 0; l <= l_max; ++l) {
    const auto roots = dispersion_roots(l, v);
    for (std::size_t i = 0; i < roots.size() && static_cast<int>(i) < m_max; ++i) {
      modes.push_back(detail::make_mode(fiber, v, l, static_cast<int>(i) + 1, roots[i]));
    }
  }
  return modes;
}

/// The guided LP_lm mode, if any. Not limited to the l/m caps of solve_lp_modes.
inline std::optional<ScalarMode> find_lp_mode(const FiberSpec& fiber, int l, int m) {
  if (l < 0 || l >= special::kMaxBesselOrder || m < 1) return std::nullopt;
  validate(fiber);
  const double v = v_number(fiber);
  const auto roots = dispersion_roots(l, v);
  if (static_cast<int>(roots.size()) < m) return std::nullopt;
  return detail::make_mode(fiber, v, l, m, roots[m - 1]);
}

/// F_lm(r), normalized so that F_lm(a) = 1.
inline double radial_profile(const ScalarMode& mode, const FiberSpec& fiber, double r_um) {
  const double a = fiber.core_radius_um;
  if (r_um <= a) {
    return special::bessel_j(mode.l, mode.u * r_um / a) / special::bessel_j(mode.l, mode.u);
  }
  return special::bessel_k(mode.l, mode.w * r_um / a) / special::bessel_k(mode.l, mode.w);
}

/// Callable radial profile bound to one solved mode.
class RadialProfile {
 public:
  RadialProfile(ScalarMode mode, FiberSpec fiber) : mode_(mode), fiber_(fiber) {
    inv_jl_ = 1.0 / special::bessel_j(mode_.l, mode_.u);
    inv_kl_ = 1.0 / special::bessel_k(mode_.l, mode_.w);
  }
  double operator()(double r_um) const {
    const double a = fiber_.core_radius_um;
    if (r_um <= a) return special::bessel_j(mode_.l, mode_.u * r_um / a) * inv_jl_;
    return special::bessel_k(mode_.l, mode_.w * r_um / a) * inv_kl_;
  }
  const ScalarMode& mode() const { return mode_; }

 private:
  ScalarMode mode_;
  FiberSpec fiber_;
  double inv_jl_ = 1.0;
  double inv_kl_ = 1.0;
};

}  // namespace fiberspin
