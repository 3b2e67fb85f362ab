#pragma once

#include <string>
#include <vector>

#include "sctm/scenario.hpp"

namespace sctm {

/// Names of the bundled experiment scenarios.
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
/// Throws std::invalid_argument for unknown names.
Scenario preset_scenario(const std::string& name);

}  // namespace sctm
