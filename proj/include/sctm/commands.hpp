#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "sctm/output.hpp"
#include "sctm/scenario.hpp"

namespace sctm {

/// Exit codes of the command layer.
enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,       ///< unexpected failure
  kExitSchema = 2,      ///< scenario violates the schema
  kExitNumerical = 3,   ///< PSD violation, negative variance, singular solve
  kExitValidation = 4,  ///< validation thresholds not met
};

struct CommandOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  bool parallel = true;
};

/// Monte-Carlo moments of the scenario; writes sim_mean/sim_std and the
/// boundary-count tables.
ResultBundle cmd_simulate(const Scenario& scenario, const std::filesystem::path& out_dir,
                          const CommandOverrides& overrides = {});

/// Fluid mean and diffusion std for densities and boundary counts.
ResultBundle cmd_approximate(const Scenario& scenario,
                             const std::filesystem::path& out_dir,
                             const CommandOverrides& overrides = {});

/// Travel-time CDF/PDF grids for every query in the scenario; a scenario
/// without queries writes only metadata.
ResultBundle cmd_traveltime(const Scenario& scenario,
                            const std::filesystem::path& out_dir,
                            const CommandOverrides& overrides = {});

/// Cell-length sweep comparing simulation against the approximations;
/// writes report.json and returns kExitValidation when thresholds fail.
int cmd_validate(const Scenario& scenario, const std::filesystem::path& out_dir,
                 const CommandOverrides& overrides = {});

}  // namespace sctm
