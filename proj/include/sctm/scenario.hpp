#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sctm/model.hpp"
#include "sctm/traveltime.hpp"

namespace sctm {

/// Scenario file violates the schema (unknown field, wrong type, bad value).
/// Messages carry the JSON path or the line/column of the syntax error.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// MFD parameter block of a scenario file.
struct MfdSpec {
  enum class Type { Daganzo, ChanutBuisson };
  Type type = Type::Daganzo;
  DaganzoParams daganzo;
  CbParams cb;

  int class_count() const { return type == Type::Daganzo ? 1 : 2; }
  FluxModelPtr make() const;
};

struct RunBlock {
  double horizon_s = 0.0;
  double snapshot_dt_s = 0.0;
  int replications = 0;
  std::uint64_t seed = 0;
};

/// Travel-time query block; the duration grid is kept in its written form
/// (range or explicit list) so serialization is canonical.
struct QuerySpec {
  int origin_cell = 1;
  int offset = 0;
  int vehicle_class = 1;
  double tag_time_s = 0.0;
  bool grid_is_range = true;
  double grid_start_s = 0.0, grid_stop_s = 0.0, grid_step_s = 0.0;
  std::vector<double> grid_explicit_s;
  bool continuity_correction = false;

  std::vector<double> grid_s() const;
  TravelTimeQuery to_query() const;  ///< converted to hours
};

/// Parsed scenario document (schema_version 1). All units are declared in
/// the field names; horizons are seconds and converted on use.
struct Scenario {
  std::string name;
  std::string notes;
  int cell_count = 0;
  int class_count = 0;
  bool uniform_length = true;
  double length_km = 0.0;
  std::vector<double> lengths_km;
  bool shared_mfd = true;
  std::vector<MfdSpec> mfds;  ///< 1 entry when shared, d+1 otherwise
  std::vector<double> lambda_veh_h;
  std::vector<double> nu_veh_h;
  std::vector<std::vector<double>> initial_density;  ///< d rows of m entries
  RunBlock run;
  std::vector<QuerySpec> queries;

  std::vector<double> cell_lengths() const;
  SegmentConfig to_config() const;
  double horizon_h() const { return run.horizon_s / 3600.0; }
  double snapshot_dt_h() const { return run.snapshot_dt_s / 3600.0; }
};

Scenario parse_scenario(const nlohmann::json& doc);
/// Parses text, reporting syntax errors with line/column; `origin` names the
/// source in messages.
Scenario parse_scenario_text(const std::string& text, const std::string& origin);
Scenario load_scenario_file(const std::filesystem::path& path);

/// Canonical serialization; parse(serialize(s)) reproduces s exactly.
nlohmann::ordered_json scenario_to_json(const Scenario& s);
std::string scenario_to_text(const Scenario& s);

}  // namespace sctm
