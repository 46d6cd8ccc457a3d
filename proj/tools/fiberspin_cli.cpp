// fiberspin: fiber modes, OAM fields and spin-orbit Bell states from the command line.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fiberspin/commands.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string out_dir;
  std::string grid;
  std::vector<std::string> tolerances;
  bool json = false;
};

fiberspin::RunConfig load(const Options& opt) {
  fiberspin::RunConfig config =
      opt.config_path.empty() ? fiberspin::RunConfig{} : fiberspin::parse_config_file(opt.config_path);
  if (!opt.out_dir.empty()) config.output_dir = opt.out_dir;
  if (!opt.grid.empty()) fiberspin::set_grid_shape(config, opt.grid);
  for (const auto& t : opt.tolerances) fiberspin::set_tolerance(config, t);
  config.finalize();
  if (config.fiber.weak_guidance_warning()) {
    std::cerr << "warning: relative index contrast " << config.fiber.relative_index_contrast()
              << " is not weakly guiding; LP results are approximate\n";
  }
  return config;
}

template <class Report>
void emit(const Report& report, bool json) {
  if (json) {
    std::cout << report.to_json().dump(2) << '\n';
  } else {
    report.print(std::cout);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weakly guiding fiber modes, OAM fields and single-photon spin-orbit Bell states"};
  app.require_subcommand(1);
  Options opt;
  std::string mode_label;
  std::string oam_spec;

  std::vector<CLI::App*> commands{
      app.add_subcommand("modes", "List guided LP modes and their vector-mode groups"),
      app.add_subcommand("verify", "Run every invariant check; exit status 1 if any fails"),
      app.add_subcommand("field", "Export a vector or OAM mode field with its angular momentum"),
      app.add_subcommand("entangle", "Project vector and OAM modes onto SAM x OAM two-qubit states"),
      app.add_subcommand("chsh", "Maximize the CHSH quantity for the Bell catalogue and product states"),
  };
  for (CLI::App* cmd : commands) {
    cmd->add_option("--config", opt.config_path, "Run configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--out", opt.out_dir, "Output directory (overrides the config)");
    cmd->add_option("--grid", opt.grid, "Polar grid as <n_r>x<n_phi>");
    cmd->add_option("--tol", opt.tolerances, "Tolerance override name=value (repeatable)");
    cmd->add_flag("--json", opt.json, "Print the report as JSON");
  }
  CLI::App* field = commands[2];
  auto* mode_opt = field->add_option("--mode", mode_label, "Vector mode label, e.g. HE3,1,even or TE0,1");
  auto* oam_opt = field->add_option("--oam", oam_spec, "OAM mode as s,l,m, e.g. +1,2,1");
  mode_opt->excludes(oam_opt);

  CLI11_PARSE(app, argc, argv);
  if (field->parsed() && mode_label.empty() && oam_spec.empty()) {
    std::cerr << "field: one of --mode or --oam is required\n";
    return 2;
  }

  try {
    const fiberspin::RunConfig config = load(opt);
    if (commands[0]->parsed()) {
      emit(fiberspin::cmd_modes(config), opt.json);
    } else if (commands[1]->parsed()) {
      const auto report = fiberspin::cmd_verify(config);
      emit(report, opt.json);
      return report.all_passed() ? 0 : 1;
    } else if (commands[2]->parsed()) {
      fiberspin::FieldRequest request = mode_label.empty()
                                            ? fiberspin::FieldRequest{fiberspin::parse_oam_request(oam_spec)}
                                            : fiberspin::FieldRequest{fiberspin::ModeLabel::parse(mode_label)};
      emit(fiberspin::cmd_field(config, request), opt.json);
    } else if (commands[3]->parsed()) {
      emit(fiberspin::cmd_entangle(config), opt.json);
    } else if (commands[4]->parsed()) {
      emit(fiberspin::cmd_chsh(config), opt.json);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
