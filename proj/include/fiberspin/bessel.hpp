#pragma once

// Integer-order Bessel functions J_n and K_n for real arguments.
//
// J_n: ascending series for x <= 1, Miller downward recurrence normalized by
//      J_0 + 2 sum J_2k = 1 otherwise. Absolute error below 1e-12 for x <= 100.
// K_n: K_0, K_1 from the logarithmic series (x <= 2) or Steed's continued
//      fraction (x > 2), then upward recurrence, which is stable for K.

#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace fiberspin::special {

inline constexpr int kMaxBesselOrder = 50;
inline constexpr double kMaxBesselJArgument = 1000.0;

namespace detail {

inline void check_order(int order, const char* fn) {
  if (order < 0 || order > kMaxBesselOrder) {
    throw DomainError(std::string(fn) + ": order " + std::to_string(order) +
                      " outside [0, " + std::to_string(kMaxBesselOrder) + "]");
  }
}

inline double bessel_j_series(int order, double x) {
  const double half = 0.5 * x;
  double term = 1.0;
  for (int k = 1; k <= order; ++k) term *= half / k;
  const double q = -half * half;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * (k + order));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

inline double bessel_j_miller(int order, double x) {
  constexpr double kBig = 1e250;
  constexpr double kBigInv = 1e-250;
  const double scale = std::max(static_cast<double>(order), x);
  int start = static_cast<int>(scale + 30.0 + 10.0 * std::cbrt(scale));
  start += start % 2;

  const double two_over_x = 2.0 / x;
  double above = 0.0;   // J_{j+1}, unnormalized
  double current = 1.0; // J_j
  double result = 0.0;
  double even_sum = 0.0;
  bool accumulate = false;
  for (int j = start; j > 0; --j) {
    const double below = j * two_over_x * current - above;
    above = current;
    current = below;
    if (std::abs(current) > kBig) {
      current *= kBigInv;
      above *= kBigInv;
      result *= kBigInv;
      even_sum *= kBigInv;
    }
    if (accumulate) even_sum += current;
    accumulate = !accumulate;
    if (j == order) result = above;
  }
  if (order == 0) result = current;
  const double norm = 2.0 * even_sum - current;
  return result / norm;
}

// K_0 and K_1 together.
inline void bessel_k01(double x, double& k0, double& k1) {
  constexpr double euler_gamma = std::numbers::egamma;
  if (x <= 2.0) {
    const double y = 0.25 * x * x;
    const double log_half = std::log(0.5 * x);
    // k-th terms of I_0, I_1 and the digamma-weighted sums.
    double t0 = 1.0;        // y^k / (k!)^2
    double t1 = 0.5 * x;    // (x/2) y^k / (k! (k+1)!)
    double harmonic = 0.0;  // H_k
    double i0 = 0.0, i1 = 0.0, s0 = 0.0, s1 = 0.0;
    for (int k = 0; k < 100; ++k) {
      if (k > 0) {
        t0 *= y / (static_cast<double>(k) * k);
        t1 *= y / (static_cast<double>(k) * (k + 1));
        harmonic += 1.0 / k;
      }
      const double psi_k1 = harmonic - euler_gamma;             // psi(k+1)
      const double psi_k2 = harmonic + 1.0 / (k + 1) - euler_gamma;  // psi(k+2)
      i0 += t0;
      i1 += t1;
      s0 += psi_k1 * t0;
      s1 += (psi_k1 + psi_k2) * t1;
      if (t0 < 1e-18 * i0 && t1 < 1e-18 * i1) break;
    }
    k0 = -log_half * i0 + s0;
    k1 = 1.0 / x + log_half * i1 - 0.5 * s1;
    return;
  }
  // Steed's method for the continued fraction CF2 at nu = 0.
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 10000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < 1e-17) break;
  }
  h *= a1;
  k0 = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
  k1 = k0 * (x + 0.5 - h) / x;
}

}  // namespace detail

/// First-kind Bessel function J_order(x) for integer order in [0, 50] and
/// 0 <= x <= 1000. Throws DomainError outside that range.
inline double bessel_j(int order, double x) {
  detail::check_order(order, "bessel_j");
  if (!std::isfinite(x) || x < 0.0 || x > kMaxBesselJArgument) {
    throw DomainError("bessel_j: argument " + std::to_string(x) + " outside [0, 1000]");
  }
  if (x == 0.0) return order == 0 ? 1.0 : 0.0;
  if (x <= 1.0) return detail::bessel_j_series(order, x);
  return detail::bessel_j_miller(order, x);
}

/// Modified second-kind Bessel function K_order(x), x > 0.
inline double bessel_k(int order, double x) {
  detail::check_order(order, "bessel_k");
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("bessel_k: argument must be positive and finite, got " + std::to_string(x));
  }
  double k0 = 0.0;
  double k1 = 0.0;
  detail::bessel_k01(x, k0, k1);
  if (order == 0) return k0;
  double lower = k0;
  double current = k1;
  for (int n = 1; n < order; ++n) {
    const double next = lower + (2.0 * n / x) * current;
    lower = current;
    current = next;
  }
  return current;
}

}  // namespace fiberspin::special
