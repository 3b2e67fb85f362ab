// Regenerates scenarios/*.json from the built-in presets. Run from the
// repository root after editing src/presets.cpp; a unit test keeps the two
// in sync.

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sctm/presets.hpp"

int main(int argc, char** argv) {
  const std::filesystem::path dir = (argc > 1) ? argv[1] : "scenarios";
  std::filesystem::create_directories(dir);
  for (const auto& name : sctm::preset_names()) {
    const auto path = dir / (name + ".json");
    std::ofstream out(path, std::ios::binary);
    out << sctm::scenario_to_text(sctm::preset_scenario(name));
    std::printf("wrote %s\n", path.string().c_str());
  }
  return 0;
}
