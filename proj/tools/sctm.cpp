#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "sctm/commands.hpp"
#include "sctm/presets.hpp"
#include "sctm/version.hpp"

namespace {

struct CommonArgs {
  std::string scenario_path;
  std::string preset;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int replications = 0;
  bool replications_set = false;
  bool serial = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  auto* scenario =
      cmd->add_option("--scenario", args.scenario_path, "Scenario JSON file");
  auto* preset = cmd->add_option("--preset", args.preset, "Bundled scenario name");
  scenario->excludes(preset);
  cmd->add_option("--out", args.out_dir, "Output directory");
  cmd->add_option("--seed", args.seed, "Base seed override")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--replications", args.replications, "Replication count override")
      ->each([&args](const std::string&) { args.replications_set = true; });
  cmd->add_flag("--serial", args.serial, "Disable OpenMP parallelism");
}

sctm::Scenario resolve_scenario(const CommonArgs& args) {
  if (!args.preset.empty()) return sctm::preset_scenario(args.preset);
  if (!args.scenario_path.empty()) return sctm::load_scenario_file(args.scenario_path);
  throw CLI::ValidationError("--scenario or --preset is required");
}

sctm::CommandOverrides resolve_overrides(const CommonArgs& args) {
  sctm::CommandOverrides o;
  if (args.seed_set) o.seed = args.seed;
  if (args.replications_set) o.replications = args.replications;
  o.parallel = !args.serial;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic multi-class cell-transmission traffic model"};
  app.set_version_flag("--version", std::string("sctm ") + sctm::kVersion);
  app.require_subcommand(1);

  CommonArgs sim_args, approx_args, tt_args, val_args;
  CLI::App* sim = app.add_subcommand("simulate", "Monte-Carlo moment estimates");
  add_common(sim, sim_args);
  CLI::App* approx =
      app.add_subcommand("approximate", "Fluid mean and Gaussian std tables");
  add_common(approx, approx_args);
  CLI::App* tt = app.add_subcommand("traveltime", "Travel-time distribution grids");
  add_common(tt, tt_args);
  CLI::App* val =
      app.add_subcommand("validate", "Cell-length sweep against simulation");
  add_common(val, val_args);

  CLI::App* presets = app.add_subcommand("presets", "List bundled scenarios");

  try {
    app.parse(argc, argv);
    if (presets->parsed()) {
      for (const auto& name : sctm::preset_names()) std::printf("%s\n", name.c_str());
      return sctm::kExitOk;
    }
    if (sim->parsed()) {
      sctm::cmd_simulate(resolve_scenario(sim_args), sim_args.out_dir,
                         resolve_overrides(sim_args));
      return sctm::kExitOk;
    }
    if (approx->parsed()) {
      sctm::cmd_approximate(resolve_scenario(approx_args), approx_args.out_dir,
                            resolve_overrides(approx_args));
      return sctm::kExitOk;
    }
    if (tt->parsed()) {
      sctm::cmd_traveltime(resolve_scenario(tt_args), tt_args.out_dir,
                           resolve_overrides(tt_args));
      return sctm::kExitOk;
    }
    if (val->parsed()) {
      return sctm::cmd_validate(resolve_scenario(val_args), val_args.out_dir,
                                resolve_overrides(val_args));
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const sctm::SchemaError& e) {
    std::fprintf(stderr, "schema error: %s\n", e.what());
    return sctm::kExitSchema;
  } catch (const sctm::NumericalFault& e) {
    std::fprintf(stderr, "numerical fault: %s\n", e.what());
    return sctm::kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return sctm::kExitError;
  }
  return sctm::kExitOk;
}
