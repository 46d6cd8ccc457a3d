#pragma once

// Single-photon spin-orbit states of one (|l|, m) fiber mode group.
//
// The SAM qubit is |+->_s (sigma^+-) and the OAM qubit is |+-l>_l (e^{+-i l phi}).
// Amplitudes are stored over the ordered basis
//     |+,+l>, |+,-l>, |-,+l>, |-,-l>.
// Even/odd vector modes are Bell states over this basis:
//     HE^even_{l+1} = Phi+ = (|+,+l> + |-,-l>) / sqrt2
//     HE^odd_{l+1}  = Phi- = (|+,+l> - |-,-l>) / (i sqrt2)
//     EH^even_{l-1} = Psi+ = (|-,+l> + |+,-l>) / sqrt2
//     EH^odd_{l-1}  = Psi- = (|-,+l> - |+,-l>) / (i sqrt2)
// At l = 1 the Psi pair would come from TM/TE and is not catalogued.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "field.hpp"

namespace fiberspin {

enum class BasisIndex : int { pp = 0, pm = 1, mp = 2, mm = 3 };

inline Spin basis_spin(int k) { return k < 2 ? Spin::plus : Spin::minus; }
inline int basis_oam_sign(int k) { return k % 2 == 0 ? 1 : -1; }
inline std::string basis_name(int k) {
  static const std::array<std::string, 4> names{"|+,+l>", "|+,-l>", "|-,+l>", "|-,-l>"};
  return names.at(static_cast<std::size_t>(k));
}

inline constexpr double kStateNormTolerance = 1e-12;

class TwoQubitState {
 public:
  using Amplitudes = std::array<complex, 4>;

  /// Throws DomainError unless the amplitudes have unit norm (to 1e-12).
  TwoQubitState(Amplitudes amplitudes, int l_ref, int m_ref = 1)
      : amps_(amplitudes), l_ref_(l_ref), m_ref_(m_ref) {
    if (l_ref_ < 1 || m_ref_ < 1) throw DomainError("state needs l_ref >= 1 and m_ref >= 1");
    if (std::abs(norm2() - 1.0) > kStateNormTolerance) {
      throw DomainError("state amplitudes are not normalized (norm^2 = " + std::to_string(norm2()) + ")");
    }
  }

  static TwoQubitState normalized(Amplitudes amplitudes, int l_ref, int m_ref = 1) {
    double n2 = 0.0;
    for (const auto& a : amplitudes) n2 += std::norm(a);
    if (!(n2 > 0.0)) throw DomainError("cannot normalize a zero state");
    const double scale = 1.0 / std::sqrt(n2);
    for (auto& a : amplitudes) a *= scale;
    return TwoQubitState(amplitudes, l_ref, m_ref);
  }

  /// The product basis state |s, sign * l>.
  static TwoQubitState basis(Spin s, int oam_sign, int l_ref, int m_ref = 1) {
    Amplitudes a{};
    const int k = (s == Spin::plus ? 0 : 2) + (oam_sign > 0 ? 0 : 1);
    a[static_cast<std::size_t>(k)] = 1.0;
    return TwoQubitState(a, l_ref, m_ref);
  }

  const Amplitudes& amplitudes() const { return amps_; }
  complex operator[](BasisIndex k) const { return amps_[static_cast<std::size_t>(k)]; }
  complex operator[](int k) const { return amps_[static_cast<std::size_t>(k)]; }
  int l_ref() const { return l_ref_; }
  int m_ref() const { return m_ref_; }

 private:
  double norm2() const {
    double n2 = 0.0;
    for (const auto& a : amps_) n2 += std::norm(a);
    return n2;
  }

  Amplitudes amps_;
  int l_ref_;
  int m_ref_;
};

/// <a|b>
inline complex inner(const TwoQubitState& a, const TwoQubitState& b) {
  complex acc = 0.0;
  for (int k = 0; k < 4; ++k) acc += std::conj(a[k]) * b[k];
  return acc;
}

/// max_k |a_k e^{i theta} - b_k| with theta chosen to align a onto b.
inline double phase_aligned_distance(const TwoQubitState& a, const TwoQubitState& b) {
  const complex ov = inner(a, b);
  const complex phase = std::abs(ov) > 0.0 ? ov / std::abs(ov) : complex(1.0);
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(a[k] * phase - b[k]));
  return worst;
}

// ---------------------------------------------------------------------------
// Bell catalogue

enum class BellLabel { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

inline std::string to_string(BellLabel b) {
  switch (b) {
    case BellLabel::PhiPlus: return "Phi+";
    case BellLabel::PhiMinus: return "Phi-";
    case BellLabel::PsiPlus: return "Psi+";
    case BellLabel::PsiMinus: return "Psi-";
  }
  return "?";
}

/// Bell states available for OAM order l: four for l >= 2, Phi+- only for l = 1.
inline std::vector<BellLabel> bell_catalogue(int l) {
  if (l < 1) return {};
  if (l == 1) return {BellLabel::PhiPlus, BellLabel::PhiMinus};
  return {BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus};
}

inline TwoQubitState bell_state(BellLabel label, int l, int m = 1) {
  if (l < 1) throw DomainError("spin-orbit Bell states need l >= 1");
  const bool psi = label == BellLabel::PsiPlus || label == BellLabel::PsiMinus;
  if (psi && l == 1) throw UnstablePairError();
  const double h = 1.0 / std::numbers::sqrt2;
  const complex hi = complex(0.0, -h);  // 1 / (i sqrt2)
  TwoQubitState::Amplitudes a{};
  switch (label) {
    case BellLabel::PhiPlus:
      a = {h, 0.0, 0.0, h};
      break;
    case BellLabel::PhiMinus:
      a = {hi, 0.0, 0.0, -hi};
      break;
    case BellLabel::PsiPlus:
      a = {0.0, h, h, 0.0};
      break;
    case BellLabel::PsiMinus:
      a = {0.0, -hi, hi, 0.0};
      break;
  }
  return TwoQubitState(a, l, m);
}

/// Vector mode realizing a catalogued Bell state.
inline ModeLabel bell_vector_mode(BellLabel label, int l, int m = 1) {
  switch (label) {
    case BellLabel::PhiPlus: return he_pair(l, m).even;
    case BellLabel::PhiMinus: return he_pair(l, m).odd;
    case BellLabel::PsiPlus:
      if (l < 2) throw UnstablePairError();
      return eh_pair(l, m).even;
    case BellLabel::PsiMinus:
      if (l < 2) throw UnstablePairError();
      return eh_pair(l, m).odd;
  }
  throw LabelError("unknown Bell label");
}

/// The catalogued Bell state equal to `state` modulo global phase, if any.
inline std::optional<BellLabel> identify_bell(const TwoQubitState& state, double tol = 1e-9) {
  for (BellLabel b : bell_catalogue(state.l_ref())) {
    if (phase_aligned_distance(state, bell_state(b, state.l_ref(), state.m_ref())) < tol) return b;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Field <-> state

/// The four unit-power OAM fields spanning one (|l|, m) group, in basis order.
class SpinOrbitBasis {
 public:
  SpinOrbitBasis(int l, int m, const FiberSpec& fiber, const GridSpec& grid) : l_(l), m_(m) {
    if (l < 1) throw DomainError("spin-orbit basis needs l >= 1");
    for (int k = 0; k < 4; ++k) {
      fields_.push_back(oam_mode_field(basis_spin(k), basis_oam_sign(k) * l, m, fiber, grid));
    }
  }

  /// Basis over an arbitrary radial profile with angular order l.
  template <class Radial>
  static SpinOrbitBasis synthetic(int l, const Radial& radial, const GridSpec& grid, int m = 1) {
    if (l < 1) throw DomainError("spin-orbit basis needs l >= 1");
    std::vector<TransverseField> fields;
    for (int k = 0; k < 4; ++k) {
      fields.push_back(synthesize_oam_mode(basis_spin(k), basis_oam_sign(k) * l, radial, grid));
    }
    return SpinOrbitBasis(l, m, std::move(fields));
  }

  int l() const { return l_; }
  int m() const { return m_; }
  const GridSpec& grid() const { return fields_.front().grid(); }
  const TransverseField& operator[](int k) const { return fields_.at(static_cast<std::size_t>(k)); }

 private:
  SpinOrbitBasis(int l, int m, std::vector<TransverseField> fields)
      : l_(l), m_(m), fields_(std::move(fields)) {}

  int l_;
  int m_;
  std::vector<TransverseField> fields_;
};

inline constexpr double kSubspaceResidualLimit = 1e-6;

/// Projects a field onto the basis. Amplitudes are taken for the field scaled
/// to unit power; throws OutOfSubspaceError if 1 - sum |a|^2 >= 1e-6.
inline TwoQubitState field_to_state(const TransverseField& f, const SpinOrbitBasis& basis) {
  if (!(f.power() > 0.0)) throw ZeroFieldError();
  const double scale = 1.0 / std::sqrt(f.power());
  TwoQubitState::Amplitudes a{};
  double captured = 0.0;
  for (int k = 0; k < 4; ++k) {
    a[static_cast<std::size_t>(k)] = overlap(basis[k], f) * scale;
    captured += std::norm(a[static_cast<std::size_t>(k)]);
  }
  const double residual = 1.0 - captured;
  if (!(residual < kSubspaceResidualLimit)) throw OutOfSubspaceError(residual);
  return TwoQubitState::normalized(a, basis.l(), basis.m());
}

inline TwoQubitState field_to_state(const TransverseField& f, int l, int m, const FiberSpec& fiber,
                                    const GridSpec& grid) {
  return field_to_state(f, SpinOrbitBasis(l, m, fiber, grid));
}

/// sum_k a_k basis_k.
inline TransverseField state_to_field(const TwoQubitState& state, const SpinOrbitBasis& basis) {
  if (state.l_ref() != basis.l()) throw DomainError("state and basis have different l");
  TransverseField out = combine(state[0], basis[0], state[1], basis[1]);
  out = combine(1.0, out, state[2], basis[2]);
  return combine(1.0, out, state[3], basis[3]);
}

inline TransverseField state_to_field(const TwoQubitState& state, const FiberSpec& fiber,
                                      const GridSpec& grid) {
  return state_to_field(state, SpinOrbitBasis(state.l_ref(), state.m_ref(), fiber, grid));
}

// ---------------------------------------------------------------------------
// Entanglement and correlations

/// C = 2 |a_pp a_mm - a_pm a_mp|.
inline double concurrence(const TwoQubitState& s) {
  return std::min(1.0, 2.0 * std::abs(s[0] * s[3] - s[1] * s[2]));
}

struct SchmidtPair {
  double first = 1.0;   // larger
  double second = 0.0;  // smaller
};

/// Singular values of [[a_pp, a_pm], [a_mp, a_mm]]. With rows r1, r2 the
/// squared values are (N +- D) / 2, N = |r1|^2 + |r2|^2 and
/// D^2 = (|r1|^2 - |r2|^2)^2 + 4 |<r1, r2>|^2, which avoids forming 1 - 4 |det|^2.
inline SchmidtPair schmidt_coefficients(const TwoQubitState& s) {
  const double n1 = std::norm(s[0]) + std::norm(s[1]);
  const double n2 = std::norm(s[2]) + std::norm(s[3]);
  const complex cross = s[0] * std::conj(s[2]) + s[1] * std::conj(s[3]);
  const double disc = std::sqrt((n1 - n2) * (n1 - n2) + 4.0 * std::norm(cross));
  const double first = std::sqrt(0.5 * (n1 + n2 + disc));
  const double det = std::abs(s[0] * s[3] - s[1] * s[2]);
  return {first, first > 0.0 ? det / first : 0.0};
}

/// E(alpha, beta) = <A(alpha) (x) B(beta)> with A(t) = B(t) = cos 2t Z + sin 2t X
/// acting on the SAM and OAM qubits.
inline double correlator(const TwoQubitState& s, double alpha, double beta) {
  const double ca = std::cos(2.0 * alpha), sa = std::sin(2.0 * alpha);
  const double cb = std::cos(2.0 * beta), sb = std::sin(2.0 * beta);
  const double A[2][2] = {{ca, sa}, {sa, -ca}};
  const double B[2][2] = {{cb, sb}, {sb, -cb}};
  complex acc = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int n = 0; n < 2; ++n)
          acc += std::conj(s[2 * i + j]) * A[i][k] * B[j][n] * s[2 * k + n];
  return acc.real();
}

/// S = E(a, b) - E(a, b') + E(a', b) + E(a', b').
inline double chsh(const TwoQubitState& s, double a, double a_prime, double b, double b_prime) {
  return correlator(s, a, b) - correlator(s, a, b_prime) + correlator(s, a_prime, b) +
         correlator(s, a_prime, b_prime);
}

}  // namespace fiberspin
