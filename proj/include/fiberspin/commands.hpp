#pragma once

// Report-producing commands behind the fiberspin CLI. Each command computes a
// report, writes its artifacts under the configured output directory, and
// renders either a plain-text table or JSON.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <charconv>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "angular_momentum.hpp"
#include "chsh.hpp"
#include "config.hpp"
#include "field.hpp"
#include "field_io.hpp"
#include "scalar_solver.hpp"
#include "spin_orbit_state.hpp"

namespace fiberspin {

using json = nlohmann::json;

namespace detail {

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string());
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << text;
}

inline json complex_json(complex c) { return json::array({c.real(), c.imag()}); }

inline std::string fmt(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

}  // namespace detail

// ===========================================================================
// modes

struct ModeRow {
  ScalarMode mode;
  int degeneracy = 0;
  std::vector<std::string> vector_modes;
};

struct ModesReport {
  FiberSpec fiber;
  double v = 0.0;
  bool weak_guidance_warning = false;
  std::vector<ModeRow> rows;

  json to_json() const {
    json j;
    j["fiber"] = {{"core_radius_um", fiber.core_radius_um},
                  {"n_core", fiber.n_core},
                  {"n_clad", fiber.n_clad},
                  {"wavelength_um", fiber.wavelength_um}};
    j["v_number"] = v;
    j["weak_guidance_warning"] = weak_guidance_warning;
    j["modes"] = json::array();
    for (const auto& r : rows) {
      j["modes"].push_back({{"lp", "LP" + std::to_string(r.mode.l) + std::to_string(r.mode.m)},
                            {"l", r.mode.l},
                            {"m", r.mode.m},
                            {"u", r.mode.u},
                            {"w", r.mode.w},
                            {"n_eff", r.mode.n_eff},
                            {"beta_per_um", r.mode.beta_per_um},
                            {"degeneracy", r.degeneracy},
                            {"vector_modes", r.vector_modes}});
    }
    return j;
  }

  std::string to_csv() const {
    std::string out = "l,m,u,w,n_eff,beta_per_um,degeneracy,vector_modes\n";
    for (const auto& r : rows) {
      std::string members;
      for (const auto& name : r.vector_modes) members += (members.empty() ? "" : " ") + name;
      out += std::to_string(r.mode.l) + "," + std::to_string(r.mode.m) + "," +
             detail::fmt(r.mode.u, 17) + "," + detail::fmt(r.mode.w, 17) + "," +
             detail::fmt(r.mode.n_eff, 17) + "," + detail::fmt(r.mode.beta_per_um, 17) + "," +
             std::to_string(r.degeneracy) + "," + members + "\n";
    }
    return out;
  }

  void print(std::ostream& os) const {
    os << "V = " << detail::fmt(v, 8) << (weak_guidance_warning ? "  (warning: not weakly guiding)" : "")
       << "\n";
    os << "mode   u            w            n_eff            beta [rad/um]   deg  vector modes\n";
    for (const auto& r : rows) {
      char line[160];
      std::snprintf(line, sizeof line, "LP%d%d   %-12.9f %-12.9f %-16.12f %-15.10f %-4d ", r.mode.l,
                    r.mode.m, r.mode.u, r.mode.w, r.mode.n_eff, r.mode.beta_per_um, r.degeneracy);
      os << line;
      for (std::size_t k = 0; k < r.vector_modes.size(); ++k)
        os << (k ? ", " : "") << r.vector_modes[k];
      os << '\n';
    }
  }
};

/// Vector modes making up an LP_lm group: {HE_1m x2} for l = 0, four otherwise.
inline std::vector<ModeLabel> lp_group_members(int l, int m) {
  const auto he = he_pair(l, m);
  if (l == 0) return {he.even, he.odd};
  const auto eh = eh_pair(l, m);
  return {he.even, he.odd, eh.even, eh.odd};
}

inline ModesReport cmd_modes(const RunConfig& config) {
  ModesReport report;
  report.fiber = config.fiber;
  report.v = v_number(config.fiber);
  report.weak_guidance_warning = config.fiber.weak_guidance_warning();
  for (const auto& mode : solve_lp_modes(config.fiber, config.l_max, config.m_max)) {
    if (mode.l < config.l_min) continue;
    ModeRow row;
    row.mode = mode;
    for (const auto& label : lp_group_members(mode.l, mode.m)) row.vector_modes.push_back(label.name());
    row.degeneracy = static_cast<int>(row.vector_modes.size());
    report.rows.push_back(std::move(row));
  }
  const std::filesystem::path dir(config.output_dir);
  detail::ensure_dir(dir);
  detail::write_text(dir / "modes.csv", report.to_csv());
  detail::write_text(dir / "modes.json", report.to_json().dump(2) + "\n");
  return report;
}

// ===========================================================================
// verify

struct Check {
  std::string name;
  std::string certifies;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = true;
  bool skipped = false;
  std::string note;
};

struct VerifyReport {
  std::vector<Check> checks;
  std::uint64_t seed = 0;
  double seconds = 0.0;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.skipped || c.passed; });
  }
  int failures() const {
    return static_cast<int>(std::count_if(checks.begin(), checks.end(),
                                          [](const Check& c) { return !c.skipped && !c.passed; }));
  }
  const Check* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  json to_json() const {
    json j;
    j["passed"] = all_passed();
    j["failures"] = failures();
    j["seed"] = seed;
    j["seconds"] = seconds;
    j["checks"] = json::array();
    for (const auto& c : checks) {
      json e{{"name", c.name}, {"certifies", c.certifies}, {"skipped", c.skipped}};
      if (!c.skipped) {
        e["residual"] = c.residual;
        e["tolerance"] = c.tolerance;
        e["passed"] = c.passed;
      }
      if (!c.note.empty()) e["note"] = c.note;
      j["checks"].push_back(e);
    }
    return j;
  }

  void print(std::ostream& os) const {
    for (const auto& c : checks) {
      if (c.skipped) {
        os << "SKIP " << c.name << "  (" << c.note << ")\n";
        continue;
      }
      os << (c.passed ? "PASS " : "FAIL ") << c.name << "  residual=" << detail::fmt(c.residual, 3)
         << " tol=" << detail::fmt(c.tolerance, 3) << "  [" << c.certifies << "]";
      if (!c.note.empty()) os << "  note: " << c.note;
      os << '\n';
    }
    os << (all_passed() ? "all checks passed" : std::to_string(failures()) + " check(s) failed")
       << " (seed " << seed << ", " << detail::fmt(seconds, 3) << " s)\n";
  }
};

namespace detail {

class CheckList {
 public:
  explicit CheckList(const RunConfig& config) : config_(config) {}

  Check& add(std::string name, std::string certifies, double residual, const std::string& tol_name,
             std::string note = {}) {
    const double tol = config_.tol(tol_name);
    return push(std::move(name), std::move(certifies), residual, tol, std::move(note));
  }

  Check& add_count(std::string name, std::string certifies, int mismatches, std::string note = {}) {
    return push(std::move(name), std::move(certifies), mismatches, 0.0, std::move(note));
  }

  void skip(std::string name, std::string certifies, std::string note) {
    Check c;
    c.name = std::move(name);
    c.certifies = std::move(certifies);
    c.skipped = true;
    c.note = std::move(note);
    checks_.push_back(std::move(c));
  }

  std::vector<Check> take() { return std::move(checks_); }

 private:
  Check& push(std::string name, std::string certifies, double residual, double tol, std::string note) {
    Check c;
    c.name = std::move(name);
    c.certifies = std::move(certifies);
    c.residual = residual;
    c.tolerance = tol;
    c.passed = std::isfinite(residual) && residual <= tol;
    c.note = std::move(note);
    checks_.push_back(std::move(c));
    return checks_.back();
  }

  const RunConfig& config_;
  std::vector<Check> checks_;
};

using Radial = std::function<double(double)>;

struct ModeGroup {
  int l = 0;
  int m = 1;
  Radial radial;
  std::string tag;  // "LP21" or "synthetic l=3"
};

inline double gram_deviation(const std::vector<TransverseField>& fields) {
  double worst = 0.0;
  for (std::size_t i = 0; i < fields.size(); ++i)
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const complex target = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(overlap(fields[i], fields[j]) - target));
    }
  return worst;
}

inline TwoQubitState random_state(std::mt19937_64& rng, int l, int m) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  TwoQubitState::Amplitudes a{};
  for (auto& x : a) x = complex(gauss(rng), gauss(rng));
  return TwoQubitState::normalized(a, l, m);
}

inline void verify_solver(const RunConfig& config, CheckList& checks) {
  const double v = v_number(config.fiber);
  const auto modes = solve_lp_modes(config.fiber, kMaxSolverL, kMaxSolverM);
  double v2 = 0.0, disp = 0.0, continuity = 0.0;
  int order_violations = 0;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const auto& md = modes[k];
    v2 = std::max(v2, std::abs(md.u * md.u + md.w * md.w - v * v) / (v * v));
    disp = std::max(disp, std::abs(dispersion_residual(md.l, v, md.u)));
    const double a = config.fiber.core_radius_um;
    const double inside = radial_profile(md, config.fiber, a * (1.0 - 1e-14));
    const double outside = radial_profile(md, config.fiber, a * (1.0 + 1e-14));
    continuity = std::max({continuity, std::abs(inside - outside), std::abs(radial_profile(md, config.fiber, a) - 1.0)});
    if (k > 0 && modes[k - 1].l == md.l && !(md.n_eff < modes[k - 1].n_eff)) ++order_violations;
    if (!(md.n_eff > config.fiber.n_clad && md.n_eff < config.fiber.n_core)) ++order_violations;
  }
  checks.add("solver.v_squared", "u^2 + w^2 = V^2 for every guided LP mode", v2, "v_squared");
  checks.add("solver.dispersion", "u J_{l+1}(u)/J_l(u) = w K_{l+1}(w)/K_l(w) at every root", disp,
             "dispersion");
  checks.add_count("solver.neff_order", "n_clad < n_eff < n_core, strictly decreasing in m",
                   order_violations);
  checks.add("solver.continuity", "F_lm continuous at r = a", continuity, "continuity");

  int mismatches = 0;
  std::string detail_note;
  for (int l = 0; l <= kMaxSolverL; ++l) {
    const int scan = count_roots_by_scan(l, v, 10000);
    const int solved = static_cast<int>(dispersion_roots(l, v).size());
    if (scan != solved) {
      ++mismatches;
      detail_note += "l=" + std::to_string(l) + ": scan " + std::to_string(scan) + " vs solver " +
                     std::to_string(solved) + "; ";
    }
  }
  checks.add_count("solver.scan_equivalence", "mode count per l equals a 10^4-point sign-change scan",
                   mismatches, detail_note);
}

inline void verify_group(const RunConfig& config, const ModeGroup& group, CheckList& checks) {
  const GridSpec& grid = config.grid;
  const int l = group.l;
  const std::string at = "[" + group.tag + "]";
  const complex i(0.0, 1.0);

  // OAM combination identities
  const auto he = he_pair(l, group.m);
  const auto he_even = synthesize_vector_mode(he.even, group.radial, grid);
  const auto he_odd = synthesize_vector_mode(he.odd, group.radial, grid);
  std::vector<std::pair<Spin, int>> oam_modes{{Spin::plus, l}, {Spin::minus, -l}};
  double identity = max_relative_deviation(normalize(combine(1.0, he_even, i, he_odd)),
                                           synthesize_oam_mode(Spin::plus, l, group.radial, grid));
  identity = std::max(identity, max_relative_deviation(normalize(combine(1.0, he_even, -i, he_odd)),
                                                       synthesize_oam_mode(Spin::minus, -l, group.radial, grid)));
  std::optional<TransverseField> eh_even, eh_odd;
  if (l >= 1) {
    const auto eh = eh_pair(l, group.m);
    eh_even = synthesize_vector_mode(eh.even, group.radial, grid);
    eh_odd = synthesize_vector_mode(eh.odd, group.radial, grid);
    identity = std::max(identity, max_relative_deviation(normalize(combine(1.0, *eh_even, i, *eh_odd)),
                                                         synthesize_oam_mode(Spin::minus, l, group.radial, grid)));
    identity = std::max(identity, max_relative_deviation(normalize(combine(1.0, *eh_even, -i, *eh_odd)),
                                                         synthesize_oam_mode(Spin::plus, -l, group.radial, grid)));
    oam_modes.push_back({Spin::minus, l});
    oam_modes.push_back({Spin::plus, -l});
  }
  checks.add("field.identity" + at,
             l == 0 ? "HE_1m even +- i odd = sigma^+- F_0m"
                    : (l == 1 ? "HE_2m even +- i odd = sigma^+- e^{+-i phi} F; TM +- i TE = sigma^-+ e^{+-i phi} F"
                              : "HE even +- i odd = sigma^+- e^{+-il phi} F; EH even +- i odd = sigma^-+ e^{+-il phi} F"),
             identity, "field_identity");

  // Orthonormality of the OAM set and of the vector-mode parities
  std::vector<TransverseField> oam_fields;
  for (const auto& [s, q] : oam_modes) oam_fields.push_back(synthesize_oam_mode(s, q, group.radial, grid));
  checks.add("field.orthonormality" + at,
             l == 0 ? "sigma^+ and sigma^- fundamentals are orthonormal"
                    : "the four SAM x OAM fields of the group are orthonormal",
             gram_deviation(oam_fields), "orthonormality");
  std::vector<TransverseField> vector_fields{he_even, he_odd};
  if (eh_even) {
    vector_fields.push_back(*eh_even);
    vector_fields.push_back(*eh_odd);
  }
  checks.add("field.parity_orthogonality" + at,
             "even/odd vector modes and the HE/EH subspaces are mutually orthogonal",
             gram_deviation(vector_fields), "orthonormality");

  // Angular momentum of the OAM modes
  double sam_err = 0.0, oam_err = 0.0, spectrum_err = 0.0;
  int sign_violations = 0;
  for (std::size_t k = 0; k < oam_modes.size(); ++k) {
    const auto [s, q] = oam_modes[k];
    const auto spec = oam_spectrum(oam_fields[k]);
    const double s_exp = sam_expectation(oam_fields[k]);
    const double l_exp = oam_expectation(spec);
    sam_err = std::max(sam_err, std::abs(s_exp - charge(s)));
    oam_err = std::max(oam_err, std::abs(l_exp - q));
    spectrum_err = std::max(spectrum_err, std::abs(spec.total() - 1.0));
    if (l >= 1) {
      const bool aligned = source_family(s, q) == Family::HE;
      const int product = (s_exp > 0 ? 1 : -1) * (l_exp > 0 ? 1 : -1);
      if (product != (aligned ? 1 : -1) || std::abs(s_exp) <= 0.99 || std::abs(l_exp) / l <= 0.99)
        ++sign_violations;
    }
  }
  checks.add("am.sam" + at, "OAM modes carry <s> = s = +-1", sam_err, "sam");
  checks.add("am.oam" + at, l == 0 ? "fundamental modes carry zero OAM" : "OAM modes carry <l> = +-l",
             oam_err, "expectation");
  if (l >= 1) {
    checks.add_count("am.sign_rule" + at, "HE-derived: SAM and OAM aligned; EH/TE/TM-derived: opposite",
                     sign_violations);
  }

  // Vector-mode spectra: two lines of weight 1/2
  double vector_weight_err = 0.0;
  int line_count_errors = 0;
  for (std::size_t k = 0; k < vector_fields.size(); ++k) {
    const auto spec = oam_spectrum(vector_fields[k]);
    spectrum_err = std::max(spectrum_err, std::abs(spec.total() - 1.0));
    if (l == 0) continue;
    // HE: sigma^+ at +l and sigma^- at -l; EH/TM/TE: sigma^- at +l and sigma^+ at -l
    const bool he_family = k < 2;
    const double a = he_family ? spec.at(l).w_plus : spec.at(l).w_minus;
    const double b = he_family ? spec.at(-l).w_minus : spec.at(-l).w_plus;
    vector_weight_err = std::max({vector_weight_err, std::abs(a - 0.5), std::abs(b - 0.5)});
    int lines = 0;
    for (const auto& [q, w] : spec.weights) {
      if (w.w_plus > 1e-9) ++lines;
      if (w.w_minus > 1e-9) ++lines;
    }
    if (lines != 2) ++line_count_errors;
  }
  checks.add("am.spectrum_sum" + at, "OAM spectrum weights sum to 1", spectrum_err, "spectrum");
  if (l >= 1) {
    checks.add("am.vector_spectrum" + at, "vector modes are equal-weight pairs of +-l OAM lines",
               vector_weight_err, "spectrum",
               line_count_errors ? std::to_string(line_count_errors) + " spectra without exactly two lines" : "");
    if (line_count_errors) checks.add_count("am.vector_lines" + at, "exactly two OAM lines per vector mode", line_count_errors);
  }

  if (l == 0) return;

  // Bell decompositions
  const auto basis = SpinOrbitBasis::synthetic(l, group.radial, grid, group.m);
  double bell_err = 0.0;
  int catalogue_errors = 0;
  std::vector<BellLabel> seen;
  for (BellLabel label : bell_catalogue(l)) {
    const auto field = synthesize_vector_mode(bell_vector_mode(label, l, group.m), group.radial, grid);
    const auto state = field_to_state(field, basis);
    bell_err = std::max(bell_err, phase_aligned_distance(state, bell_state(label, l, group.m)));
    const auto id = identify_bell(state, config.tol("bell_amplitude"));
    if (!id || *id != label || std::find(seen.begin(), seen.end(), *id) != seen.end()) ++catalogue_errors;
    if (id) seen.push_back(*id);
  }
  std::string note;
  if (l == 1) {
    note = "Psi+/Psi- excluded: TE/TM are not strictly degenerate";
    for (BellLabel psi : {BellLabel::PsiPlus, BellLabel::PsiMinus}) {
      try {
        (void)bell_state(psi, 1);
        ++catalogue_errors;
      } catch (const UnstablePairError&) {
      }
    }
    // TM/TE project onto states outside the two-state catalogue
    for (const auto& f : {*eh_even, *eh_odd}) {
      if (identify_bell(field_to_state(f, basis))) ++catalogue_errors;
    }
  }
  const std::size_t expected = l == 1 ? 2 : 4;
  if (seen.size() != expected) ++catalogue_errors;
  checks.add("state.bell_decomposition" + at,
             l == 1 ? "HE_2m even/odd = Phi+/Phi-" : "HE even/odd = Phi+/Phi-, EH even/odd = Psi+/Psi-",
             bell_err, "bell_amplitude", note);
  checks.add_count("state.catalogue" + at,
                   l == 1 ? "exactly two Bell states at l = 1" : "exactly four Bell states for l >= 2",
                   catalogue_errors, note);

  // Round trips
  std::mt19937_64 rng(config.seed + 1000003ull * static_cast<unsigned>(l) + static_cast<unsigned>(group.m));
  double roundtrip = 0.0;
  for (int n = 0; n < config.roundtrip_samples; ++n) {
    const auto state = random_state(rng, l, group.m);
    roundtrip = std::max(roundtrip, phase_aligned_distance(field_to_state(state_to_field(state, basis), basis), state));
  }
  checks.add("state.roundtrip" + at,
             "field_to_state(state_to_field(psi)) = psi for " + std::to_string(config.roundtrip_samples) +
                 " seeded random states",
             roundtrip, "state_roundtrip");

  // Entanglement of catalogued and product states
  double conc_bell = 0.0, schmidt_bell = 0.0, conc_product = 0.0, bell_overlap = 0.0;
  const auto catalogue = bell_catalogue(l);
  for (std::size_t a = 0; a < catalogue.size(); ++a) {
    const auto s = bell_state(catalogue[a], l, group.m);
    conc_bell = std::max(conc_bell, std::abs(concurrence(s) - 1.0));
    const auto sc = schmidt_coefficients(s);
    schmidt_bell = std::max({schmidt_bell, std::abs(sc.first - std::numbers::sqrt2 / 2),
                             std::abs(sc.second - std::numbers::sqrt2 / 2)});
    for (std::size_t b = a + 1; b < catalogue.size(); ++b)
      bell_overlap = std::max(bell_overlap, std::abs(inner(s, bell_state(catalogue[b], l, group.m))));
  }
  for (const auto& f : oam_fields) conc_product = std::max(conc_product, concurrence(field_to_state(f, basis)));
  checks.add("state.concurrence_bell" + at, "catalogued Bell states have concurrence 1", conc_bell, "concurrence");
  checks.add("state.schmidt_bell" + at, "Bell states have Schmidt pair (1/sqrt2, 1/sqrt2)", schmidt_bell, "schmidt");
  checks.add("state.bell_orthogonality" + at, "Bell states are pairwise orthogonal", bell_overlap, "bell_amplitude");
  checks.add("state.concurrence_product" + at, "OAM modes are product states (concurrence 0)", conc_product,
             "concurrence");

  // CHSH
  double chsh_err = 0.0;
  for (BellLabel label : catalogue) {
    const auto opt = maximize_chsh(bell_state(label, l, group.m), config.chsh_grid);
    chsh_err = std::max(chsh_err, std::abs(opt.s - 2.0 * std::numbers::sqrt2));
  }
  double classical_excess = 0.0;
  for (int k = 0; k < 4; ++k) {
    const auto opt = maximize_chsh(TwoQubitState::basis(basis_spin(k), basis_oam_sign(k), l, group.m),
                                   config.chsh_grid);
    classical_excess = std::max(classical_excess, opt.s - kClassicalChshBound);
  }
  checks.add("chsh.bell_max" + at, "Bell states reach S_max = 2 sqrt 2", chsh_err, "chsh");
  checks.add("chsh.product_bound" + at, "product states satisfy S <= 2", std::max(0.0, classical_excess),
             "classical_bound");
}

// Synthetic groups reuse a guided radial profile with a higher angular order.
inline Radial synthetic_profile(const FiberSpec& fiber) {
  if (auto lp11 = find_lp_mode(fiber, 1, 1)) {
    RadialProfile p(*lp11, fiber);
    return [p](double r) { return p(r); };
  }
  RadialProfile p(*find_lp_mode(fiber, 0, 1), fiber);
  return [p](double r) { return p(r); };
}

}  // namespace detail

inline VerifyReport cmd_verify(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  detail::CheckList checks(config);
  detail::verify_solver(config, checks);

  int total_charge_errors = 0;
  for (int l = 1; l <= 5; ++l) {
    for (Spin s : {Spin::plus, Spin::minus}) {
      for (int sign : {1, -1}) {
        const int j = std::abs(total_am_charge(s, sign * l));
        const bool aligned = charge(s) * sign > 0;
        const int subscript = aligned ? he_pair(l, 1).even.angular_subscript : eh_pair(l, 1).even.angular_subscript;
        if (j != subscript || j != source_subscript(s, sign * l)) ++total_charge_errors;
      }
    }
  }
  checks.add_count("am.total_charge", "|s + l| equals the HE/EH/TE/TM angular subscript for l = 1..5",
                   total_charge_errors);

  std::vector<detail::ModeGroup> groups;
  for (int l = config.l_min; l <= config.l_max; ++l) {
    for (int m = 1; m <= config.m_max; ++m) {
      const std::string tag = "LP" + std::to_string(l) + std::to_string(m);
      if (auto mode = find_lp_mode(config.fiber, l, m)) {
        RadialProfile p(*mode, config.fiber);
        groups.push_back({l, m, [p](double r) { return p(r); }, tag});
      } else {
        checks.skip("group[" + tag + "]", "LP group checks", tag + " is not guided by this fiber");
      }
    }
  }
  const auto synthetic = detail::synthetic_profile(config.fiber);
  for (int l = 2; l <= 5; ++l) groups.push_back({l, 1, synthetic, "synthetic l=" + std::to_string(l)});

  for (const auto& group : groups) detail::verify_group(config, group, checks);

  // Quadrature convergence on the first group with l >= 1
  for (const auto& group : groups) {
    if (group.l < 1) continue;
    GridSpec fine = config.grid;
    fine.n_r *= 2;
    fine.n_phi *= 2;
    auto probe = [&](const GridSpec& g) {
      const auto a = synthesize_vector_mode(he_pair(group.l, group.m).even, group.radial, g);
      const auto b = synthesize_oam_mode(Spin::plus, group.l, group.radial, g);
      return overlap(b, a);
    };
    checks.add("field.grid_convergence[" + group.tag + "]", "overlaps are stable under grid doubling",
               std::abs(probe(fine) - probe(config.grid)), "grid_convergence");
    break;
  }

  VerifyReport report;
  report.checks = checks.take();
  report.seed = config.seed;
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::filesystem::path dir(config.output_dir);
  detail::ensure_dir(dir);
  detail::write_text(dir / "verify.json", report.to_json().dump(2) + "\n");
  return report;
}

// ===========================================================================
// field

struct OamRequest {
  Spin s = Spin::plus;
  int l = 0;
  int m = 1;
};

using FieldRequest = std::variant<ModeLabel, OamRequest>;

/// Parses "+1,2,1" / "-1,-2,1" as (s, l, m).
inline OamRequest parse_oam_request(const std::string& text) {
  std::vector<int> parts;
  std::string cur;
  auto flush = [&] {
    std::string t = detail::trim(cur);
    if (!t.empty() && t.front() == '+') t.erase(0, 1);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
      throw LabelError("OAM mode must be s,l,m (e.g. +1,2,1), got '" + text + "'");
    parts.push_back(value);
    cur.clear();
  };
  for (char c : text) {
    if (c == ',') flush();
    else cur.push_back(c);
  }
  flush();
  if (parts.size() != 3) throw LabelError("OAM mode must be s,l,m (e.g. +1,2,1), got '" + text + "'");
  OamRequest req;
  req.s = spin_from_charge(parts[0]);
  req.l = parts[1];
  req.m = parts[2];
  if (req.m < 1) throw LabelError("radial order m must be >= 1");
  return req;
}

struct FieldReport {
  std::string name;
  double s_expectation = 0.0;
  double l_expectation = 0.0;
  std::optional<int> j;  // OAM modes only
  int j_abs = 0;         // |j| of the constituent OAM modes
  bool unstable = false;
  OamSpectrum spectrum;
  std::vector<std::string> files;

  json to_json() const {
    json out{{"mode", name},
             {"s_expectation", s_expectation},
             {"l_expectation", l_expectation},
             {"j_abs", j_abs},
             {"unstable", unstable},
             {"files", files}};
    out["j"] = j ? json(*j) : json(nullptr);
    json spec = json::array();
    for (const auto& [q, w] : spectrum.weights) spec.push_back({{"q", q}, {"w_plus", w.w_plus}, {"w_minus", w.w_minus}});
    out["spectrum"] = spec;
    return out;
  }

  void print(std::ostream& os) const {
    os << name << (unstable ? "  (unstable: built from TM +- iTE)" : "") << "\n"
       << "  <s> = " << detail::fmt(s_expectation, 10) << "\n"
       << "  <l> = " << detail::fmt(l_expectation, 10) << "\n";
    if (j) os << "  j = s + l = " << *j << "\n";
    else os << "  |j| = " << j_abs << " (superposition of j = +-" << j_abs << ")\n";
    for (const auto& f : files) os << "  wrote " << f << "\n";
  }
};

inline FieldReport cmd_field(const RunConfig& config, const FieldRequest& request) {
  FieldReport report;
  std::optional<TransverseField> field;
  if (const auto* label = std::get_if<ModeLabel>(&request)) {
    field = vector_mode_field(*label, config.fiber, config.grid);
    report.name = label->name();
    report.j_abs = label->angular_subscript;
  } else {
    const auto& req = std::get<OamRequest>(request);
    field = oam_mode_field(req.s, req.l, req.m, config.fiber, config.grid);
    report.name = std::string("OAM(s=") + (req.s == Spin::plus ? "+1" : "-1") + ",l=" + std::to_string(req.l) +
                  ",m=" + std::to_string(req.m) + ")";
    report.j = total_am_charge(req.s, req.l);
    report.j_abs = std::abs(*report.j);
    report.unstable = is_unstable_oam(req.s, req.l);
  }
  report.spectrum = oam_spectrum(*field);
  report.s_expectation = sam_expectation(*field);
  report.l_expectation = oam_expectation(report.spectrum);

  const std::filesystem::path dir(config.output_dir);
  detail::ensure_dir(dir);
  {
    std::ofstream os(dir / "field.csv");
    write_field_csv(*field, os);
    report.files.push_back((dir / "field.csv").string());
  }
  {
    std::ofstream os(dir / "spectrum.csv");
    write_spectrum_csv(report.spectrum, os);
    report.files.push_back((dir / "spectrum.csv").string());
  }
  write_ppm(intensity_image(*field), (dir / "intensity.ppm").string());
  report.files.push_back((dir / "intensity.ppm").string());
  write_ppm(phase_image(*field), (dir / "phase.ppm").string());
  report.files.push_back((dir / "phase.ppm").string());
  detail::write_text(dir / "field.json", report.to_json().dump(2) + "\n");
  report.files.push_back((dir / "field.json").string());
  return report;
}

// ===========================================================================
// entangle

struct EntangleEntry {
  std::string mode;
  int l = 0;
  int m = 1;
  std::optional<BellLabel> bell;
  bool excluded = false;  // TM/TE at l = 1
  TwoQubitState::Amplitudes amplitudes{};
  double concurrence = 0.0;
  SchmidtPair schmidt;
};

struct EntangleReport {
  std::vector<EntangleEntry> vector_modes;
  std::vector<EntangleEntry> oam_modes;
  std::vector<std::string> notes;

  static json entry_json(const EntangleEntry& e) {
    json amps = json::object();
    for (int k = 0; k < 4; ++k) amps[basis_name(k)] = detail::complex_json(e.amplitudes[static_cast<std::size_t>(k)]);
    json out{{"mode", e.mode},
             {"l_ref", e.l},
             {"m_ref", e.m},
             {"amplitudes", amps},
             {"basis", {basis_name(0), basis_name(1), basis_name(2), basis_name(3)}},
             {"concurrence", e.concurrence},
             {"schmidt", {e.schmidt.first, e.schmidt.second}}};
    out["bell"] = e.bell ? json(to_string(*e.bell)) : json(nullptr);
    if (e.excluded) out["excluded"] = "TE/TM are not strictly degenerate; not a catalogued Bell state";
    return out;
  }

  json to_json() const {
    json j{{"vector_modes", json::array()}, {"oam_modes", json::array()}, {"notes", notes}};
    for (const auto& e : vector_modes) j["vector_modes"].push_back(entry_json(e));
    for (const auto& e : oam_modes) j["oam_modes"].push_back(entry_json(e));
    return j;
  }

  void print(std::ostream& os) const {
    auto amp = [](complex c) {
      return "(" + detail::fmt(c.real(), 6) + (c.imag() < 0 ? "-" : "+") + detail::fmt(std::abs(c.imag()), 6) + "i)";
    };
    os << "vector modes (basis |+,+l>, |+,-l>, |-,+l>, |-,-l>):\n";
    for (const auto& e : vector_modes) {
      os << "  " << e.mode << "  " << (e.bell ? to_string(*e.bell) : (e.excluded ? "excluded" : "-")) << "  [";
      for (int k = 0; k < 4; ++k) os << (k ? " " : "") << amp(e.amplitudes[static_cast<std::size_t>(k)]);
      os << "]  C=" << detail::fmt(e.concurrence, 10) << "  schmidt=(" << detail::fmt(e.schmidt.first, 10) << ", "
         << detail::fmt(e.schmidt.second, 10) << ")\n";
    }
    os << "OAM modes:\n";
    for (const auto& e : oam_modes) os << "  " << e.mode << "  C=" << detail::fmt(e.concurrence, 10) << "\n";
    for (const auto& n : notes) os << "note: " << n << "\n";
  }
};

inline EntangleReport cmd_entangle(const RunConfig& config) {
  EntangleReport report;
  for (int l = std::max(config.l_min, 0); l <= config.l_max; ++l) {
    for (int m = 1; m <= config.m_max; ++m) {
      if (!find_lp_mode(config.fiber, l, m)) continue;
      if (l == 0) {
        report.notes.push_back("LP0" + std::to_string(m) + ": zero OAM, no spin-orbit entanglement");
        continue;
      }
      const SpinOrbitBasis basis(l, m, config.fiber, config.grid);
      for (const auto& label : lp_group_members(l, m)) {
        EntangleEntry e;
        e.mode = label.name();
        e.l = l;
        e.m = m;
        const auto state = field_to_state(vector_mode_field(label, config.fiber, config.grid), basis);
        e.amplitudes = state.amplitudes();
        e.bell = identify_bell(state, config.tol("bell_amplitude"));
        e.excluded = label.family == Family::TE || label.family == Family::TM;
        e.concurrence = concurrence(state);
        e.schmidt = schmidt_coefficients(state);
        report.vector_modes.push_back(e);
      }
      if (l == 1) {
        report.notes.push_back("LP1" + std::to_string(m) +
                               ": only Phi+/Phi- are catalogued; TM/TE are not strictly degenerate");
      }
      for (int k = 0; k < 4; ++k) {
        EntangleEntry e;
        const Spin s = basis_spin(k);
        const int q = basis_oam_sign(k) * l;
        e.mode = std::string("OAM(s=") + (s == Spin::plus ? "+1" : "-1") + ",l=" + std::to_string(q) + ",m=" +
                 std::to_string(m) + ")";
        e.l = l;
        e.m = m;
        const auto state = field_to_state(basis[k], basis);
        e.amplitudes = state.amplitudes();
        e.concurrence = concurrence(state);
        e.schmidt = schmidt_coefficients(state);
        e.excluded = is_unstable_oam(s, q);
        report.oam_modes.push_back(e);
      }
    }
  }
  const std::filesystem::path dir(config.output_dir);
  detail::ensure_dir(dir);
  detail::write_text(dir / "entangle.json", report.to_json().dump(2) + "\n");
  return report;
}

// ===========================================================================
// chsh

struct ChshEntry {
  std::string state;
  ChshOptimum optimum;
  bool bell = true;
};

struct ChshReport {
  int l_ref = 0;
  int grid = 0;
  std::vector<ChshEntry> entries;
  std::size_t sweep_rows = 0;
  std::vector<std::string> files;

  json to_json() const {
    json j{{"l_ref", l_ref}, {"grid", grid}, {"classical_bound", kClassicalChshBound},
           {"quantum_bound", 2.0 * std::numbers::sqrt2}, {"sweep_rows", sweep_rows}, {"files", files}};
    j["states"] = json::array();
    for (const auto& e : entries) {
      const auto& st = e.optimum.settings;
      j["states"].push_back({{"state", e.state},
                             {"bell", e.bell},
                             {"s_max", e.optimum.s},
                             {"s_grid", e.optimum.s_grid},
                             {"violates_classical_bound", e.optimum.s > kClassicalChshBound + 1e-9},
                             {"settings", {{"a", st.a}, {"a_prime", st.a_prime}, {"b", st.b}, {"b_prime", st.b_prime}}}});
    }
    return j;
  }

  void print(std::ostream& os) const {
    os << "CHSH S = E(a,b) - E(a,b') + E(a',b) + E(a',b'); classical bound 2, quantum bound "
       << detail::fmt(2.0 * std::numbers::sqrt2, 10) << "\n";
    for (const auto& e : entries) {
      const auto& st = e.optimum.settings;
      os << "  " << e.state << "  S_max=" << detail::fmt(e.optimum.s, 10) << "  (grid " << detail::fmt(e.optimum.s_grid, 10)
         << ")  a=" << detail::fmt(st.a) << " a'=" << detail::fmt(st.a_prime) << " b=" << detail::fmt(st.b)
         << " b'=" << detail::fmt(st.b_prime) << (e.optimum.s > kClassicalChshBound + 1e-9 ? "  > 2" : "  <= 2")
         << "\n";
    }
    for (const auto& f : files) os << "  wrote " << f << "\n";
  }
};

inline ChshReport cmd_chsh(const RunConfig& config) {
  ChshReport report;
  report.grid = config.chsh_grid;
  // Bell amplitudes do not depend on l; use the largest guided l in range.
  for (int l = config.l_max; l >= std::max(config.l_min, 1); --l) {
    if (find_lp_mode(config.fiber, l, 1)) {
      report.l_ref = l;
      break;
    }
  }
  const int l_states = std::max(report.l_ref, 1);
  std::vector<std::pair<std::string, TwoQubitState>> states;
  for (BellLabel label : bell_catalogue(report.l_ref)) states.emplace_back(to_string(label), bell_state(label, l_states));
  for (int k = 0; k < 4; ++k) {
    states.emplace_back("product " + basis_name(k),
                        TwoQubitState::basis(basis_spin(k), basis_oam_sign(k), l_states));
  }

  const auto angles = chsh_angles(config.chsh_grid);
  std::ostringstream sweep;
  sweep << "state,alpha,beta,E\n" << std::setprecision(17);
  for (const auto& [name, state] : states) {
    ChshEntry e;
    e.state = name;
    e.bell = name.rfind("product", 0) != 0;
    e.optimum = maximize_chsh(state, config.chsh_grid);
    report.entries.push_back(e);
    const auto table = correlator_table(state, angles);
    for (std::size_t i = 0; i < angles.size(); ++i)
      for (std::size_t j = 0; j < angles.size(); ++j) {
        sweep << name << ',' << angles[i] << ',' << angles[j] << ',' << table[i * angles.size() + j] << '\n';
        ++report.sweep_rows;
      }
  }
  const std::filesystem::path dir(config.output_dir);
  detail::ensure_dir(dir);
  detail::write_text(dir / "chsh_sweep.csv", sweep.str());
  report.files.push_back((dir / "chsh_sweep.csv").string());
  detail::write_text(dir / "chsh.json", report.to_json().dump(2) + "\n");
  report.files.push_back((dir / "chsh.json").string());
  return report;
}

}  // namespace fiberspin
