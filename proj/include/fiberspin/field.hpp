#pragma once

// Transverse vector fields of weakly guiding fiber modes, sampled on a polar
// grid, and the inner-product machinery used to project them.
//
// Vector modes (F = F_lm(r)):
//   HE_{l+1,m} even/odd : F (x cos l phi - y sin l phi) / F (x sin l phi + y cos l phi)
//   EH_{l-1,m} even/odd : F (x cos l phi + y sin l phi) / F (x sin l phi - y cos l phi)
//   TM_0m / TE_0m       : the EH patterns at l = 1
//   HE_1m even/odd      : F x / F y
// OAM modes: F sigma^s exp(i l phi) with sigma^+- = x +- i y (norm sqrt 2).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "scalar_solver.hpp"

namespace fiberspin {

using complex = std::complex<double>;

enum class Family { HE, EH, TE, TM };
enum class Parity { even, odd, none };

/// SAM charge of a circular polarization basis vector.
enum class Spin : int { plus = 1, minus = -1 };

inline int charge(Spin s) { return static_cast<int>(s); }
inline Spin spin_from_charge(int s) {
  if (s == 1) return Spin::plus;
  if (s == -1) return Spin::minus;
  throw LabelError("spin charge must be +1 or -1, got " + std::to_string(s));
}

/// A vector-mode label. angular_subscript is the printed subscript, so
/// HE_{l+1,m} has subscript l + 1 and EH_{l-1,m} has subscript l - 1.
struct ModeLabel {
  Family family = Family::HE;
  Parity parity = Parity::even;
  int angular_subscript = 1;
  int m = 1;

  friend bool operator==(const ModeLabel&, const ModeLabel&) = default;

  void validate() const {
    if (m < 1) throw LabelError("radial order m must be >= 1");
    switch (family) {
      case Family::TE:
      case Family::TM:
        if (angular_subscript != 0 || parity != Parity::none)
          throw LabelError("TE/TM modes have subscript 0 and no parity");
        break;
      case Family::HE:
      case Family::EH:
        if (angular_subscript < 1) throw LabelError("HE/EH modes need subscript >= 1");
        if (parity == Parity::none) throw LabelError("HE/EH modes need even or odd parity");
        break;
    }
  }

  /// Angular order l of the LP group the mode belongs to.
  int lp_order() const {
    switch (family) {
      case Family::HE:
        return angular_subscript - 1;
      case Family::EH:
        return angular_subscript + 1;
      case Family::TE:
      case Family::TM:
        return 1;
    }
    return -1;
  }

  std::string name() const {
    std::string out;
    switch (family) {
      case Family::HE: out = "HE"; break;
      case Family::EH: out = "EH"; break;
      case Family::TE: out = "TE"; break;
      case Family::TM: out = "TM"; break;
    }
    out += std::to_string(angular_subscript) + "," + std::to_string(m);
    if (parity == Parity::even) out += ",even";
    if (parity == Parity::odd) out += ",odd";
    return out;
  }

  /// Parses names of the form produced by name(), e.g. "HE3,1,even" or "TE0,1".
  static ModeLabel parse(const std::string& text) {
    if (text.size() < 3) throw LabelError("cannot parse mode label '" + text + "'");
    ModeLabel label;
    const std::string fam = text.substr(0, 2);
    if (fam == "HE") label.family = Family::HE;
    else if (fam == "EH") label.family = Family::EH;
    else if (fam == "TE") label.family = Family::TE;
    else if (fam == "TM") label.family = Family::TM;
    else throw LabelError("unknown mode family in '" + text + "'");

    std::vector<std::string> parts;
    std::string cur;
    for (char c : text.substr(2)) {
      if (c == ',') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    parts.push_back(cur);
    if (parts.size() < 2 || parts.size() > 3) throw LabelError("cannot parse mode label '" + text + "'");
    try {
      std::size_t used = 0;
      label.angular_subscript = std::stoi(parts[0], &used);
      if (used != parts[0].size()) throw LabelError("bad subscript in '" + text + "'");
      label.m = std::stoi(parts[1], &used);
      if (used != parts[1].size()) throw LabelError("bad radial order in '" + text + "'");
    } catch (const std::logic_error&) {
      throw LabelError("cannot parse mode label '" + text + "'");
    }
    if (parts.size() == 3) {
      if (parts[2] == "even") label.parity = Parity::even;
      else if (parts[2] == "odd") label.parity = Parity::odd;
      else throw LabelError("parity must be even or odd in '" + text + "'");
    } else {
      label.parity = Parity::none;
    }
    label.validate();
    return label;
  }
};

/// Polar sampling grid: midpoint rule in r, uniform in phi starting at 0.
struct GridSpec {
  double r_max_um = 15.0;
  int n_r = 128;
  int n_phi = 256;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

  static GridSpec for_fiber(const FiberSpec& fiber, int n_r = 128, int n_phi = 256) {
    return GridSpec{3.0 * fiber.core_radius_um, n_r, n_phi};
  }

  void validate() const {
    if (!(r_max_um > 0.0)) throw DomainError("grid r_max must be positive");
    if (n_r < 64) throw DomainError("grid needs at least 64 radial samples");
    if (n_phi < 128 || n_phi % 2 != 0)
      throw DomainError("grid needs an even number (>= 128) of azimuthal samples");
  }

  double dr() const { return r_max_um / n_r; }
  double dphi() const { return 2.0 * std::numbers::pi / n_phi; }
  double r(int i) const { return (i + 0.5) * dr(); }
  double phi(int j) const { return j * dphi(); }
  std::size_t size() const { return static_cast<std::size_t>(n_r) * n_phi; }
};

/// Complex transverse field at one point.
struct Jones {
  complex x;
  complex y;

  friend Jones operator*(complex a, const Jones& j) { return {a * j.x, a * j.y}; }
  friend Jones operator+(const Jones& a, const Jones& b) { return {a.x + b.x, a.y + b.y}; }
  friend Jones operator-(const Jones& a, const Jones& b) { return {a.x - b.x, a.y - b.y}; }
  double norm2() const { return std::norm(x) + std::norm(y); }
};

/// sigma^+ = x + i y, sigma^- = x - i y.
inline Jones circular(Spin s) {
  return {complex(1.0, 0.0), complex(0.0, static_cast<double>(charge(s)))};
}

/// Sampled transverse field (Ex, Ey), row-major with phi fastest. Immutable.
class TransverseField {
 public:
  TransverseField(GridSpec grid, std::vector<Jones> samples)
      : grid_(grid), samples_(std::move(samples)) {
    grid_.validate();
    if (samples_.size() != grid_.size()) {
      throw std::invalid_argument("sample count does not match the grid");
    }
    power_ = integrate_power();
  }

  const GridSpec& grid() const { return grid_; }
  const std::vector<Jones>& samples() const { return samples_; }
  const Jones& at(int i_r, int j_phi) const {
    return samples_[static_cast<std::size_t>(i_r) * grid_.n_phi + j_phi];
  }
  /// Integral of |Ex|^2 + |Ey|^2 over the grid.
  double power() const { return power_; }

  double peak_amplitude() const {
    double peak = 0.0;
    for (const auto& s : samples_) peak = std::max(peak, s.norm2());
    return std::sqrt(peak);
  }

 private:
  double integrate_power() const {
    double total = 0.0;
    for (int i = 0; i < grid_.n_r; ++i) {
      double ring = 0.0;
      for (int j = 0; j < grid_.n_phi; ++j) ring += at(i, j).norm2();
      total += ring * grid_.r(i);
    }
    return total * grid_.dr() * grid_.dphi();
  }

  GridSpec grid_;
  std::vector<Jones> samples_;
  double power_ = 0.0;
};

/// Samples radial(r) * pattern(phi) on the grid.
template <class Radial, class Pattern>
TransverseField sample_separable(const GridSpec& grid, const Radial& radial, const Pattern& pattern) {
  grid.validate();
  std::vector<double> rows(grid.n_r);
  for (int i = 0; i < grid.n_r; ++i) rows[i] = radial(grid.r(i));
  std::vector<Jones> cols(grid.n_phi);
  for (int j = 0; j < grid.n_phi; ++j) cols[j] = pattern(grid.phi(j));
  std::vector<Jones> samples;
  samples.reserve(grid.size());
  for (int i = 0; i < grid.n_r; ++i) {
    for (int j = 0; j < grid.n_phi; ++j) samples.push_back(complex(rows[i]) * cols[j]);
  }
  return TransverseField(grid, std::move(samples));
}

inline TransverseField normalize(const TransverseField& f) {
  if (!(f.power() > 0.0)) throw ZeroFieldError();
  const double scale = 1.0 / std::sqrt(f.power());
  std::vector<Jones> out;
  out.reserve(f.samples().size());
  for (const auto& s : f.samples()) out.push_back(complex(scale) * s);
  return TransverseField(f.grid(), std::move(out));
}

/// Pointwise a f1 + b f2.
inline TransverseField combine(complex a, const TransverseField& f1, complex b,
                               const TransverseField& f2) {
  if (!(f1.grid() == f2.grid())) throw GridMismatchError();
  std::vector<Jones> out;
  out.reserve(f1.samples().size());
  for (std::size_t k = 0; k < f1.samples().size(); ++k) {
    out.push_back(a * f1.samples()[k] + b * f2.samples()[k]);
  }
  return TransverseField(f1.grid(), std::move(out));
}

/// <f1|f2> = integral of conj(Ex1) Ex2 + conj(Ey1) Ey2 dA.
inline complex overlap(const TransverseField& f1, const TransverseField& f2) {
  if (!(f1.grid() == f2.grid())) throw GridMismatchError();
  const GridSpec& g = f1.grid();
  complex total = 0.0;
  for (int i = 0; i < g.n_r; ++i) {
    complex ring = 0.0;
    for (int j = 0; j < g.n_phi; ++j) {
      const Jones& p = f1.at(i, j);
      const Jones& q = f2.at(i, j);
      ring += std::conj(p.x) * q.x + std::conj(p.y) * q.y;
    }
    total += ring * g.r(i);
  }
  return total * (g.dr() * g.dphi());
}

/// max |f - g| over the grid divided by the peak amplitude of g.
inline double max_relative_deviation(const TransverseField& f, const TransverseField& g) {
  if (!(f.grid() == g.grid())) throw GridMismatchError();
  double worst = 0.0;
  for (std::size_t k = 0; k < f.samples().size(); ++k) {
    worst = std::max(worst, (f.samples()[k] - g.samples()[k]).norm2());
  }
  const double peak = g.peak_amplitude();
  return peak > 0.0 ? std::sqrt(worst) / peak : std::sqrt(worst);
}

// ---------------------------------------------------------------------------
// Angular polarization patterns

/// Unnormalized polarization pattern of a vector mode at azimuth phi.
inline Jones vector_pattern(const ModeLabel& label, double phi) {
  const int l = label.lp_order();
  const double c = std::cos(l * phi);
  const double s = std::sin(l * phi);
  switch (label.family) {
    case Family::HE:
      return label.parity == Parity::even ? Jones{c, -s} : Jones{s, c};
    case Family::EH:
      return label.parity == Parity::even ? Jones{c, s} : Jones{s, -c};
    case Family::TM:
      return Jones{c, s};
    case Family::TE:
      return Jones{s, -c};
  }
  return {};
}

/// sigma^s exp(i l phi).
inline Jones oam_pattern(Spin s, int l_signed, double phi) {
  return std::polar(1.0, l_signed * phi) * circular(s);
}

/// The OAM modes sigma^- e^{+i phi} and sigma^+ e^{-i phi} come from TM +- iTE,
/// which are not strictly degenerate with HE_21.
inline bool is_unstable_oam(Spin s, int l_signed) {
  return std::abs(l_signed) == 1 && charge(s) * l_signed < 0;
}

// ---------------------------------------------------------------------------
// Mode fields

/// Unit-power vector mode for an arbitrary radial profile. The profile's
/// angular order is taken from the label.
template <class Radial>
TransverseField synthesize_vector_mode(const ModeLabel& label, const Radial& radial,
                                       const GridSpec& grid) {
  label.validate();
  return normalize(sample_separable(grid, radial, [&](double phi) { return vector_pattern(label, phi); }));
}

/// Unit-power OAM mode sigma^s e^{i l phi} F(r) for an arbitrary radial profile.
template <class Radial>
TransverseField synthesize_oam_mode(Spin s, int l_signed, const Radial& radial,
                                    const GridSpec& grid) {
  return normalize(
      sample_separable(grid, radial, [&](double phi) { return oam_pattern(s, l_signed, phi); }));
}

namespace detail {

inline RadialProfile guided_profile(int l, int m, const FiberSpec& fiber, const GridSpec& grid) {
  if (m < 1) throw LabelError("radial order m must be >= 1");
  if (grid.r_max_um < 2.0 * fiber.core_radius_um) {
    throw DomainError("grid r_max must be at least twice the core radius");
  }
  const auto mode = find_lp_mode(fiber, l, m);
  if (!mode) throw UnguidedModeError(l, m);
  return RadialProfile(*mode, fiber);
}

}  // namespace detail

/// Unit-power field of a vector mode of the fiber.
inline TransverseField vector_mode_field(const ModeLabel& label, const FiberSpec& fiber,
                                         const GridSpec& grid) {
  label.validate();
  grid.validate();
  const auto profile = detail::guided_profile(label.lp_order(), label.m, fiber, grid);
  return synthesize_vector_mode(label, profile, grid);
}

/// Unit-power OAM mode sigma^s e^{i l phi} F_{|l|,m}(r) of the fiber.
inline TransverseField oam_mode_field(Spin s, int l_signed, int m, const FiberSpec& fiber,
                                      const GridSpec& grid) {
  grid.validate();
  const auto profile = detail::guided_profile(std::abs(l_signed), m, fiber, grid);
  return synthesize_oam_mode(s, l_signed, profile, grid);
}

/// The even/odd vector-mode pair whose +-i combinations give the OAM modes of
/// LP_lm for the HE (aligned) or EH (anti-aligned) branch. For l = 1 the EH
/// branch is (TM, TE); for l = 0 only the HE branch exists.
struct VectorPair {
  ModeLabel even;
  ModeLabel odd;
};

inline VectorPair he_pair(int l, int m) {
  return {ModeLabel{Family::HE, Parity::even, l + 1, m}, ModeLabel{Family::HE, Parity::odd, l + 1, m}};
}

inline VectorPair eh_pair(int l, int m) {
  if (l < 1) throw LabelError("LP_0m has no EH branch");
  if (l == 1) {
    return {ModeLabel{Family::TM, Parity::none, 0, m}, ModeLabel{Family::TE, Parity::none, 0, m}};
  }
  return {ModeLabel{Family::EH, Parity::even, l - 1, m}, ModeLabel{Family::EH, Parity::odd, l - 1, m}};
}

}  // namespace fiberspin
