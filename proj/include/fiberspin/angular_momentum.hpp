#pragma once

// Spin and orbital angular momentum content of sampled transverse fields.
//
// The field is split into circular channels E_+- = (Ex -+ i Ey) / 2, so that
// E = E_+ sigma^+ + E_- sigma^-. Each channel is Fourier analysed in phi on
// every ring; the ring spectra are integrated radially into power fractions.

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <ostream>
#include <vector>

#include "errors.hpp"
#include "field.hpp"

namespace fiberspin {

struct ChannelWeights {
  double w_plus = 0.0;
  double w_minus = 0.0;
  double total() const { return w_plus + w_minus; }
};

/// Power fraction per azimuthal charge q and circular channel.
/// Charges whose total weight is below kSpectrumFloor are omitted.
struct OamSpectrum {
  std::map<int, ChannelWeights> weights;

  double total() const {
    double sum = 0.0;
    for (const auto& [q, w] : weights) sum += w.total();
    return sum;
  }
  ChannelWeights at(int q) const {
    const auto it = weights.find(q);
    return it == weights.end() ? ChannelWeights{} : it->second;
  }
};

inline constexpr double kSpectrumFloor = 1e-14;
inline constexpr double kAliasingLimit = 1e-6;

namespace detail {

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 forward DFT, X_q = sum_j x_j e^{-2 pi i j q / n}.
inline void fft_radix2(std::vector<complex>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const complex tw = std::polar(1.0, angle * static_cast<double>(k));
        const complex u = a[i + k];
        const complex v = a[i + k + len / 2] * tw;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

inline std::vector<complex> dft(const std::vector<complex>& x) {
  const std::size_t n = x.size();
  if (is_power_of_two(static_cast<int>(n))) {
    auto out = x;
    fft_radix2(out);
    return out;
  }
  std::vector<complex> twiddle(n);
  for (std::size_t k = 0; k < n; ++k) {
    twiddle[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / n);
  }
  std::vector<complex> out(n);
  for (std::size_t q = 0; q < n; ++q) {
    complex acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += x[j] * twiddle[(j * q) % n];
    out[q] = acc;
  }
  return out;
}

inline double require_power(const TransverseField& f) {
  if (!(f.power() > 0.0)) throw ZeroFieldError();
  return f.power();
}

}  // namespace detail

/// <s> = integral of -i (Ex* Ey - Ey* Ex) dA / power; +1 for sigma^+, -1 for sigma^-.
inline double sam_expectation(const TransverseField& f) {
  const double power = detail::require_power(f);
  const GridSpec& g = f.grid();
  double total = 0.0;
  for (int i = 0; i < g.n_r; ++i) {
    double ring = 0.0;
    for (int j = 0; j < g.n_phi; ++j) {
      const Jones& s = f.at(i, j);
      // -i (a - conj(a)) = 2 Im(a) with a = Ex* Ey
      ring += 2.0 * (std::conj(s.x) * s.y).imag();
    }
    total += ring * g.r(i);
  }
  return total * g.dr() * g.dphi() / power;
}

/// Azimuthal charge spectrum of each circular channel. Throws AliasingError if
/// more than 1e-6 of the power sits in the top band |q| >= n_phi/2 - 1.
inline OamSpectrum oam_spectrum(const TransverseField& f) {
  const double power = detail::require_power(f);
  const GridSpec& g = f.grid();
  const int n = g.n_phi;
  // Parseval: sum_j |E_j|^2 dphi = (2 pi / n^2) sum_q |X_q|^2.
  const double ring_scale = g.dr() * 2.0 * std::numbers::pi / (static_cast<double>(n) * n);

  std::vector<double> plus(n, 0.0), minus(n, 0.0);
  std::vector<complex> ep(n), em(n);
  for (int i = 0; i < g.n_r; ++i) {
    for (int j = 0; j < n; ++j) {
      const Jones& s = f.at(i, j);
      const complex iy = complex(0.0, 1.0) * s.y;
      ep[j] = 0.5 * (s.x - iy);
      em[j] = 0.5 * (s.x + iy);
    }
    const auto sp = detail::dft(ep);
    const auto sm = detail::dft(em);
    // |sigma^+-|^2 = 2
    const double w = 2.0 * g.r(i) * ring_scale;
    for (int q = 0; q < n; ++q) {
      plus[q] += w * std::norm(sp[q]);
      minus[q] += w * std::norm(sm[q]);
    }
  }

  OamSpectrum spectrum;
  double top_band = 0.0;
  for (int k = 0; k < n; ++k) {
    const int q = k < n / 2 ? k : k - n;
    const ChannelWeights cw{plus[k] / power, minus[k] / power};
    if (std::abs(q) >= n / 2 - 1) top_band += cw.total();
    if (q == -n / 2) continue;
    if (cw.total() >= kSpectrumFloor) spectrum.weights[q] = cw;
  }
  if (top_band > kAliasingLimit) {
    throw AliasingError("azimuthal spectrum has weight " + std::to_string(top_band) +
                        " in the top band; increase n_phi");
  }
  return spectrum;
}

/// <l> = sum_q q (w_plus(q) + w_minus(q)).
inline double oam_expectation(const OamSpectrum& spectrum) {
  double total = 0.0;
  for (const auto& [q, w] : spectrum.weights) total += q * w.total();
  return total;
}

inline double oam_expectation(const TransverseField& f) { return oam_expectation(oam_spectrum(f)); }

/// Total angular momentum charge j = s + l of an OAM mode.
inline int total_am_charge(Spin s, int l_signed) { return charge(s) + l_signed; }

/// Vector-mode family whose +-i combination yields the OAM mode (s, l):
/// HE when SAM and OAM are aligned (or l = 0), EH (TE/TM at |l| = 1) otherwise.
inline Family source_family(Spin s, int l_signed) {
  if (l_signed == 0 || charge(s) * l_signed > 0) return Family::HE;
  return std::abs(l_signed) == 1 ? Family::TM : Family::EH;
}

/// Printed angular subscript of the vector mode the OAM mode (s, l) is built from.
inline int source_subscript(Spin s, int l_signed) {
  const int l = std::abs(l_signed);
  if (source_family(s, l_signed) == Family::HE) return l + 1;
  return l - 1;
}

inline void write_spectrum_csv(const OamSpectrum& spectrum, std::ostream& os) {
  os << "q,w_plus,w_minus\n";
  const auto old = os.precision(17);
  for (const auto& [q, w] : spectrum.weights) os << q << ',' << w.w_plus << ',' << w.w_minus << '\n';
  os.precision(old);
}

}  // namespace fiberspin
