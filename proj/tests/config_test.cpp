#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "fiberspin/config.hpp"

namespace fs = fiberspin;

namespace {

fs::RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return fs::parse_config(in);
}

int error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const fs::ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(Config, DefaultsAndRequiredTolerances) {
  const fs::RunConfig c;
  EXPECT_EQ(c.tol("field_identity"), 1e-10);
  EXPECT_EQ(c.tol("state_roundtrip"), 1e-9);
  EXPECT_EQ(c.tol("expectation"), 1e-4);
  EXPECT_THROW(c.tol("nonsense"), fs::ConfigError);
  EXPECT_DOUBLE_EQ(c.grid.r_max_um, 3.0 * c.fiber.core_radius_um);
  EXPECT_EQ(c.grid.n_r, 128);
  EXPECT_EQ(c.grid.n_phi, 256);
}

TEST(Config, ParsesAllSections) {
  auto c = parse(R"(# comment line
[fiber]
core_radius_um = 7.5   # trailing comment
n_core = 1.47
n_clad = 1.45
wavelength_um = 1.31

[grid]
n_r = 96
n_phi = 192

[run]
l_min = 1
l_max = 3
m_max = 2
seed = 42
roundtrip_samples = 10
output_dir = results/run1

[chsh]
grid = 32

[tolerances]
field_identity = 1e-11
)");
  c.finalize();
  EXPECT_EQ(c.fiber.core_radius_um, 7.5);
  EXPECT_EQ(c.fiber.wavelength_um, 1.31);
  EXPECT_EQ(c.grid.n_phi, 192);
  EXPECT_DOUBLE_EQ(c.grid.r_max_um, 22.5);
  EXPECT_EQ(c.l_min, 1);
  EXPECT_EQ(c.m_max, 2);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.output_dir, "results/run1");
  EXPECT_EQ(c.chsh_grid, 32);
  EXPECT_EQ(c.tol("field_identity"), 1e-11);
  EXPECT_EQ(c.tol("state_roundtrip"), 1e-9);
}

TEST(Config, ExplicitRadiusIsKept) {
  auto c = parse("[grid]\nr_max_um = 40\n");
  c.finalize();
  EXPECT_EQ(c.grid.r_max_um, 40.0);
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("[fiber]\nn_core = abc\n"), 2);
  EXPECT_EQ(error_line("\n\n[bogus]\n"), 3);
  EXPECT_EQ(error_line("n_core = 1.4\n"), 1);
  EXPECT_EQ(error_line("[fiber]\nradius = 3\n"), 2);
  EXPECT_EQ(error_line("[fiber]\nn_core\n"), 2);
  EXPECT_EQ(error_line("[run]\n\nl_max = 2.5\n"), 3);
  EXPECT_EQ(error_line("[tolerances]\nchsh = -1\n"), 2);
  EXPECT_EQ(error_line("[tolerances]\nmystery = 1\n"), 2);
  EXPECT_EQ(error_line("[fiber\n"), 1);
  try {
    parse("[fiber]\nn_core = abc\n");
  } catch (const fs::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Config, FinalizeRejectsInvalidValues) {
  auto c = parse("[run]\nl_max = 11\n");
  EXPECT_THROW(c.finalize(), fs::ConfigError);
  c = parse("[fiber]\nn_clad = 1.5\n");
  EXPECT_THROW(c.finalize(), fs::DomainError);
  c = parse("[grid]\nn_r = 10\n");
  EXPECT_THROW(c.finalize(), fs::DomainError);
}

TEST(Config, RoundTripIsExact) {
  auto c = parse("[fiber]\ncore_radius_um = 7.2306167\nn_core = 1.4600000000000002\n[grid]\nr_max_um = 21.1\n"
                 "[run]\nseed = 18446744073709551615\n[tolerances]\nchsh = 3.3e-7\n");
  const auto text = fs::to_config_text(c);
  const auto back = parse(text);
  EXPECT_EQ(back.fiber.core_radius_um, c.fiber.core_radius_um);
  EXPECT_EQ(back.fiber.n_core, c.fiber.n_core);
  EXPECT_EQ(back.grid.r_max_um, c.grid.r_max_um);
  EXPECT_TRUE(back.grid_r_max_set);
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.tolerances, c.tolerances);
  EXPECT_EQ(fs::to_config_text(back), text);
}

TEST(Config, CommandLineOverrides) {
  fs::RunConfig c;
  fs::set_tolerance(c, "orthonormality=1e-16");
  EXPECT_EQ(c.tol("orthonormality"), 1e-16);
  EXPECT_THROW(fs::set_tolerance(c, "orthonormality"), fs::ConfigError);
  EXPECT_THROW(fs::set_tolerance(c, "unknown=1"), fs::ConfigError);
  fs::set_grid_shape(c, "64x128");
  EXPECT_EQ(c.grid.n_r, 64);
  EXPECT_EQ(c.grid.n_phi, 128);
  EXPECT_THROW(fs::set_grid_shape(c, "64-128"), fs::ConfigError);
  EXPECT_THROW(fs::set_grid_shape(c, "64xabc"), fs::ConfigError);
}
