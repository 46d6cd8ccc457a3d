#pragma once

// Run configuration: a flat "key = value" text format with [section] headers.
//
//   [fiber]       core_radius_um, n_core, n_clad, wavelength_um
//   [grid]        n_r, n_phi, r_max_um (defaults to 3 * core radius)
//   [run]         l_min, l_max, m_max, seed, roundtrip_samples, output_dir
//   [chsh]        grid
//   [tolerances]  any tolerance name listed in default_tolerances()
//
// '#' starts a comment. Lengths are micrometres, angles radians.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "errors.hpp"
#include "field.hpp"
#include "scalar_solver.hpp"

namespace fiberspin {

inline const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> tolerances{
      {"field_identity", 1e-10},     // normalized +-i combinations vs analytic OAM forms
      {"state_roundtrip", 1e-9},     // field_to_state o state_to_field
      {"expectation", 1e-4},         // <l> against the OAM charge
      {"sam", 1e-6},                 // <s> against the SAM charge
      {"orthonormality", 1e-8},      // Gram matrix of the OAM basis
      {"spectrum", 1e-9},            // spectrum sums and vector-mode weights
      {"bell_amplitude", 1e-9},      // vector-mode projections vs Bell amplitudes
      {"concurrence", 1e-9},
      {"schmidt", 1e-9},
      {"chsh", 1e-6},                // S_max against 2 sqrt 2
      {"classical_bound", 1e-9},     // product states stay below 2
      {"dispersion", 1e-8},          // dispersion residual at solved roots
      {"v_squared", 1e-10},          // |u^2 + w^2 - V^2| / V^2
      {"continuity", 1e-12},         // F_lm at the core boundary
      {"grid_convergence", 1e-6},    // overlap change when the grid is doubled
  };
  return tolerances;
}

struct RunConfig {
  FiberSpec fiber;
  GridSpec grid = GridSpec::for_fiber(FiberSpec{});
  bool grid_r_max_set = false;
  int l_min = 0;
  int l_max = 5;
  int m_max = 1;
  std::uint64_t seed = 20240611;
  int roundtrip_samples = 100;
  int chsh_grid = 64;
  std::string output_dir = "out";
  std::map<std::string, double> tolerances = default_tolerances();

  double tol(const std::string& name) const {
    const auto it = tolerances.find(name);
    if (it == tolerances.end()) throw ConfigError("unknown tolerance '" + name + "'", 0);
    return it->second;
  }

  /// Re-derives the grid radius from the fiber unless it was set explicitly.
  void finalize() {
    if (!grid_r_max_set) grid.r_max_um = 3.0 * fiber.core_radius_um;
    validate(fiber);
    grid.validate();
    if (l_min < 0 || l_max < l_min || l_max > kMaxSolverL)
      throw ConfigError("l range must satisfy 0 <= l_min <= l_max <= 10", 0);
    if (m_max < 1 || m_max > kMaxSolverM) throw ConfigError("m_max must be in [1, 5]", 0);
    if (chsh_grid < 4) throw ConfigError("chsh grid must have at least 4 points", 0);
    if (roundtrip_samples < 1) throw ConfigError("roundtrip_samples must be positive", 0);
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_double(const std::string& text, int line) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError("expected a number, got '" + text + "'", line);
  return value;
}

template <class Int>
Int parse_integer(const std::string& text, int line) {
  Int value = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError("expected an integer, got '" + text + "'", line);
  return value;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Applies "name=value" to the tolerance table.
inline void set_tolerance(RunConfig& config, const std::string& assignment, int line = 0) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("tolerance must be name=value", line);
  const std::string name = detail::trim(assignment.substr(0, eq));
  if (!config.tolerances.contains(name)) throw ConfigError("unknown tolerance '" + name + "'", line);
  const double value = detail::parse_double(detail::trim(assignment.substr(eq + 1)), line);
  if (!(value >= 0.0)) throw ConfigError("tolerance must be non-negative", line);
  config.tolerances[name] = value;
}

/// Parses "<n_r>x<n_phi>".
inline void set_grid_shape(RunConfig& config, const std::string& shape) {
  const auto x = shape.find('x');
  if (x == std::string::npos) throw ConfigError("grid must be <n_r>x<n_phi>, got '" + shape + "'", 0);
  config.grid.n_r = detail::parse_integer<int>(shape.substr(0, x), 0);
  config.grid.n_phi = detail::parse_integer<int>(shape.substr(x + 1), 0);
}

inline RunConfig parse_config(std::istream& in) {
  RunConfig config;
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "fiber" && section != "grid" && section != "run" && section != "chsh" &&
          section != "tolerances") {
        throw ConfigError("unknown section [" + section + "]", line_no);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line_no);
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError("key '" + key + "' outside any section", line_no);
    if (value.empty()) throw ConfigError("missing value for '" + key + "'", line_no);

    auto number = [&] { return detail::parse_double(value, line_no); };
    auto integer = [&] { return detail::parse_integer<int>(value, line_no); };
    auto unknown = [&] { throw ConfigError("unknown key '" + key + "' in [" + section + "]", line_no); };

    if (section == "fiber") {
      if (key == "core_radius_um") config.fiber.core_radius_um = number();
      else if (key == "n_core") config.fiber.n_core = number();
      else if (key == "n_clad") config.fiber.n_clad = number();
      else if (key == "wavelength_um") config.fiber.wavelength_um = number();
      else unknown();
    } else if (section == "grid") {
      if (key == "n_r") config.grid.n_r = integer();
      else if (key == "n_phi") config.grid.n_phi = integer();
      else if (key == "r_max_um") {
        config.grid.r_max_um = number();
        config.grid_r_max_set = true;
      } else unknown();
    } else if (section == "run") {
      if (key == "l_min") config.l_min = integer();
      else if (key == "l_max") config.l_max = integer();
      else if (key == "m_max") config.m_max = integer();
      else if (key == "seed") config.seed = detail::parse_integer<std::uint64_t>(value, line_no);
      else if (key == "roundtrip_samples") config.roundtrip_samples = integer();
      else if (key == "output_dir") config.output_dir = value;
      else unknown();
    } else if (section == "chsh") {
      if (key == "grid") config.chsh_grid = integer();
      else unknown();
    } else {
      set_tolerance(config, key + "=" + value, line_no);
    }
  }
  return config;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path, 0);
  return parse_config(in);
}

/// Serializes a config so that parse_config reproduces it exactly.
inline std::string to_config_text(const RunConfig& c) {
  using detail::format_double;
  std::ostringstream os;
  os << "[fiber]\n"
     << "core_radius_um = " << format_double(c.fiber.core_radius_um) << '\n'
     << "n_core = " << format_double(c.fiber.n_core) << '\n'
     << "n_clad = " << format_double(c.fiber.n_clad) << '\n'
     << "wavelength_um = " << format_double(c.fiber.wavelength_um) << "\n\n"
     << "[grid]\n"
     << "n_r = " << c.grid.n_r << '\n'
     << "n_phi = " << c.grid.n_phi << '\n';
  if (c.grid_r_max_set) os << "r_max_um = " << format_double(c.grid.r_max_um) << '\n';
  os << "\n[run]\n"
     << "l_min = " << c.l_min << '\n'
     << "l_max = " << c.l_max << '\n'
     << "m_max = " << c.m_max << '\n'
     << "seed = " << c.seed << '\n'
     << "roundtrip_samples = " << c.roundtrip_samples << '\n'
     << "output_dir = " << c.output_dir << "\n\n"
     << "[chsh]\n"
     << "grid = " << c.chsh_grid << "\n\n"
     << "[tolerances]\n";
  for (const auto& [name, value] : c.tolerances) os << name << " = " << format_double(value) << '\n';
  return os.str();
}

}  // namespace fiberspin
