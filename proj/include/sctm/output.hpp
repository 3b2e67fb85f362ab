#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sctm/ctmc.hpp"
#include "sctm/diffusion.hpp"
#include "sctm/fluid.hpp"
#include "sctm/traveltime.hpp"

namespace sctm {

/// Locale-independent shortest-roundtrip-ish formatting (12 significant
/// digits) so reruns produce byte-identical files.
std::string format_number(double v);

/// Files produced by one command invocation plus their run metadata.
struct ResultBundle {
  std::filesystem::path out_dir;
  std::vector<std::string> files;
  nlohmann::ordered_json metadata;
};

/// Long-format table: time_s,cell,class,value,unit.
void write_cell_table(const std::filesystem::path& file,
                      const std::vector<double>& time_h, int cells, int classes,
                      const std::vector<double>& values_snapshot_major,
                      const std::string& unit);

/// Long-format table over boundaries: time_s,boundary,class,value,unit.
void write_boundary_table(const std::filesystem::path& file,
                          const std::vector<double>& time_h, int boundaries,
                          int classes, const std::vector<double>& values_snapshot_major,
                          const std::string& unit);

/// Travel-time grids: x_s,origin_cell,destination_cell,class,value,unit.
void write_traveltime_table(const std::filesystem::path& file,
                            const std::vector<TravelTimeDistribution>& dists,
                            bool pdf);

void write_metadata(ResultBundle& bundle, const std::string& file = "metadata.json");

}  // namespace sctm
