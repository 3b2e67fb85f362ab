#include "sctm/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sctm {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw SchemaError(path + ": " + message);
}

void require_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& required,
                  const std::set<std::string>& optional) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!required.contains(key) && !optional.contains(key)) {
      fail(path, "unknown field '" + key + "'");
    }
  }
  for (const auto& key : required) {
    if (!obj.contains(key)) fail(path, "missing required field '" + key + "'");
  }
}

double get_number(const json& obj, const std::string& path, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<int>();
}

std::uint64_t get_seed(const json& obj, const std::string& path, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned() && !v.is_number_integer()) {
    fail(path + "." + key, "expected an unsigned integer");
  }
  if (v.is_number_integer() && v.get<long long>() < 0) {
    fail(path + "." + key, "seed must be nonnegative");
  }
  return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const std::string& path, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_number_array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

MfdSpec parse_mfd(const json& obj, const std::string& path) {
  if (!obj.is_object() || !obj.contains("type")) fail(path, "expected an MFD block with 'type'");
  const std::string type = get_string(obj, path, "type");
  MfdSpec spec;
  if (type == "daganzo") {
    require_keys(obj, path, {"type", "v_f", "w", "q_max", "rho_jam"}, {});
    spec.type = MfdSpec::Type::Daganzo;
    spec.daganzo.free_flow_speed_kmh = get_number(obj, path, "v_f");
    spec.daganzo.wave_speed_kmh = get_number(obj, path, "w");
    spec.daganzo.capacity_veh_h = get_number(obj, path, "q_max");
    spec.daganzo.jam_density_veh_km = get_number(obj, path, "rho_jam");
  } else if (type == "chanut_buisson") {
    require_keys(obj, path, {"type", "v_f1", "v_f2", "v_c", "L1", "L2", "N", "beta"}, {});
    spec.type = MfdSpec::Type::ChanutBuisson;
    spec.cb.car_free_flow_kmh = get_number(obj, path, "v_f1");
    spec.cb.truck_free_flow_kmh = get_number(obj, path, "v_f2");
    spec.cb.critical_speed_kmh = get_number(obj, path, "v_c");
    spec.cb.car_length_km = get_number(obj, path, "L1");
    spec.cb.truck_length_km = get_number(obj, path, "L2");
    spec.cb.lane_count = get_int(obj, path, "N");
    spec.cb.critical_fraction = get_number(obj, path, "beta");
  } else {
    fail(path + ".type", "unknown MFD type '" + type + "'");
  }
  return spec;
}

ordered_json mfd_to_json(const MfdSpec& spec) {
  ordered_json j;
  if (spec.type == MfdSpec::Type::Daganzo) {
    j["type"] = "daganzo";
    j["v_f"] = spec.daganzo.free_flow_speed_kmh;
    j["w"] = spec.daganzo.wave_speed_kmh;
    j["q_max"] = spec.daganzo.capacity_veh_h;
    j["rho_jam"] = spec.daganzo.jam_density_veh_km;
  } else {
    j["type"] = "chanut_buisson";
    j["v_f1"] = spec.cb.car_free_flow_kmh;
    j["v_f2"] = spec.cb.truck_free_flow_kmh;
    j["v_c"] = spec.cb.critical_speed_kmh;
    j["L1"] = spec.cb.car_length_km;
    j["L2"] = spec.cb.truck_length_km;
    j["N"] = spec.cb.lane_count;
    j["beta"] = spec.cb.critical_fraction;
  }
  return j;
}

}  // namespace

FluxModelPtr MfdSpec::make() const {
  if (type == Type::Daganzo) return make_daganzo(daganzo);
  return make_chanut_buisson(cb);
}

std::vector<double> QuerySpec::grid_s() const {
  if (!grid_is_range) return grid_explicit_s;
  std::vector<double> g;
  const long long n = std::llround((grid_stop_s - grid_start_s) / grid_step_s);
  g.reserve(n + 1);
  for (long long k = 0; k <= n; ++k) g.push_back(grid_start_s + k * grid_step_s);
  return g;
}

TravelTimeQuery QuerySpec::to_query() const {
  TravelTimeQuery q;
  q.origin_cell = origin_cell;
  q.offset = offset;
  q.vehicle_class = vehicle_class;
  q.tag_time_h = tag_time_s / 3600.0;
  for (double x : grid_s()) q.grid_h.push_back(x / 3600.0);
  q.continuity_correction = continuity_correction;
  return q;
}

std::vector<double> Scenario::cell_lengths() const {
  if (uniform_length) return std::vector<double>(cell_count, length_km);
  return lengths_km;
}

SegmentConfig Scenario::to_config() const {
  std::vector<FluxModelPtr> models;
  if (shared_mfd) {
    models.assign(cell_count + 1, mfds.front().make());
  } else {
    models.reserve(mfds.size());
    for (const auto& m : mfds) models.push_back(m.make());
  }
  DensityState rho0;
  rho0.reserve(cell_count * class_count);
  for (const auto& row : initial_density) {
    rho0.insert(rho0.end(), row.begin(), row.end());
  }
  return SegmentConfig(cell_lengths(), std::move(models), lambda_veh_h, nu_veh_h,
                       std::move(rho0));
}

Scenario parse_scenario(const json& doc) {
  require_keys(doc, "$",
               {"schema_version", "segment", "boundary", "initial_density_veh_per_km",
                "run"},
               {"name", "notes", "mfd", "mfds", "queries"});
  Scenario s;
  if (get_int(doc, "$", "schema_version") != 1) {
    fail("$.schema_version", "unsupported schema version");
  }
  if (doc.contains("name")) s.name = get_string(doc, "$", "name");
  if (doc.contains("notes")) s.notes = get_string(doc, "$", "notes");

  const json& seg = doc.at("segment");
  require_keys(seg, "$.segment", {"cell_count", "class_count"},
               {"length_km", "lengths_km"});
  s.cell_count = get_int(seg, "$.segment", "cell_count");
  s.class_count = get_int(seg, "$.segment", "class_count");
  if (s.cell_count < 1) fail("$.segment.cell_count", "need at least one cell");
  if (seg.contains("length_km") == seg.contains("lengths_km")) {
    fail("$.segment", "exactly one of 'length_km' and 'lengths_km' is required");
  }
  if (seg.contains("length_km")) {
    s.uniform_length = true;
    s.length_km = get_number(seg, "$.segment", "length_km");
    if (!(s.length_km > 0.0)) fail("$.segment.length_km", "must be positive");
  } else {
    s.uniform_length = false;
    s.lengths_km = get_number_array(seg.at("lengths_km"), "$.segment.lengths_km");
    if (static_cast<int>(s.lengths_km.size()) != s.cell_count) {
      fail("$.segment.lengths_km", "expected one entry per cell");
    }
    for (double l : s.lengths_km) {
      if (!(l > 0.0)) fail("$.segment.lengths_km", "lengths must be positive");
    }
  }

  if (doc.contains("mfd") == doc.contains("mfds")) {
    fail("$", "exactly one of 'mfd' and 'mfds' is required");
  }
  if (doc.contains("mfd")) {
    s.shared_mfd = true;
    s.mfds.push_back(parse_mfd(doc.at("mfd"), "$.mfd"));
  } else {
    s.shared_mfd = false;
    const json& arr = doc.at("mfds");
    if (!arr.is_array() || static_cast<int>(arr.size()) != s.cell_count + 1) {
      fail("$.mfds", "expected an array of d+1 MFD blocks");
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
      s.mfds.push_back(parse_mfd(arr[i], "$.mfds[" + std::to_string(i) + "]"));
    }
  }
  for (const auto& m : s.mfds) {
    if (m.class_count() != s.class_count) {
      fail("$.segment.class_count", "does not match the MFD's class count");
    }
  }

  const json& bnd = doc.at("boundary");
  require_keys(bnd, "$.boundary", {"lambda_veh_per_h", "nu_veh_per_h"}, {});
  s.lambda_veh_h = get_number_array(bnd.at("lambda_veh_per_h"), "$.boundary.lambda_veh_per_h");
  s.nu_veh_h = get_number_array(bnd.at("nu_veh_per_h"), "$.boundary.nu_veh_per_h");
  if (static_cast<int>(s.lambda_veh_h.size()) != s.class_count ||
      static_cast<int>(s.nu_veh_h.size()) != s.class_count) {
    fail("$.boundary", "lambda/nu need one entry per class");
  }

  const json& init = doc.at("initial_density_veh_per_km");
  if (!init.is_array() || static_cast<int>(init.size()) != s.cell_count) {
    fail("$.initial_density_veh_per_km", "expected one row per cell");
  }
  for (std::size_t i = 0; i < init.size(); ++i) {
    auto row = get_number_array(init[i],
                                "$.initial_density_veh_per_km[" + std::to_string(i) + "]");
    if (static_cast<int>(row.size()) != s.class_count) {
      fail("$.initial_density_veh_per_km[" + std::to_string(i) + "]",
           "expected one entry per class");
    }
    s.initial_density.push_back(std::move(row));
  }

  const json& run = doc.at("run");
  require_keys(run, "$.run", {"horizon_s", "snapshot_dt_s", "replications", "seed"}, {});
  s.run.horizon_s = get_number(run, "$.run", "horizon_s");
  s.run.snapshot_dt_s = get_number(run, "$.run", "snapshot_dt_s");
  s.run.replications = get_int(run, "$.run", "replications");
  s.run.seed = get_seed(run, "$.run", "seed");
  if (!(s.run.horizon_s > 0.0)) fail("$.run.horizon_s", "must be positive");
  if (!(s.run.snapshot_dt_s > 0.0)) fail("$.run.snapshot_dt_s", "must be positive");
  if (s.run.replications < 0) fail("$.run.replications", "must be nonnegative");

  if (doc.contains("queries")) {
    const json& qs = doc.at("queries");
    if (!qs.is_array()) fail("$.queries", "expected an array");
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const std::string path = "$.queries[" + std::to_string(i) + "]";
      const json& q = qs[i];
      require_keys(q, path, {"origin_cell", "offset", "class", "tag_time_s", "grid_s"},
                   {"continuity_correction"});
      QuerySpec spec;
      spec.origin_cell = get_int(q, path, "origin_cell");
      spec.offset = get_int(q, path, "offset");
      spec.vehicle_class = get_int(q, path, "class");
      spec.tag_time_s = get_number(q, path, "tag_time_s");
      if (q.contains("continuity_correction")) {
        if (!q.at("continuity_correction").is_boolean()) {
          fail(path + ".continuity_correction", "expected a boolean");
        }
        spec.continuity_correction = q.at("continuity_correction").get<bool>();
      }
      const json& grid = q.at("grid_s");
      if (grid.is_object()) {
        require_keys(grid, path + ".grid_s", {"start", "stop", "step"}, {});
        spec.grid_is_range = true;
        spec.grid_start_s = get_number(grid, path + ".grid_s", "start");
        spec.grid_stop_s = get_number(grid, path + ".grid_s", "stop");
        spec.grid_step_s = get_number(grid, path + ".grid_s", "step");
        if (!(spec.grid_step_s > 0.0) || spec.grid_stop_s < spec.grid_start_s ||
            spec.grid_start_s < 0.0) {
          fail(path + ".grid_s", "need 0 <= start <= stop and step > 0");
        }
      } else if (grid.is_array()) {
        spec.grid_is_range = false;
        spec.grid_explicit_s = get_number_array(grid, path + ".grid_s");
        double prev = -1.0;
        for (double x : spec.grid_explicit_s) {
          if (x < 0.0 || x <= prev) fail(path + ".grid_s", "must be nonnegative and increasing");
          prev = x;
        }
        if (spec.grid_explicit_s.empty()) fail(path + ".grid_s", "must not be empty");
      } else {
        fail(path + ".grid_s", "expected a {start, stop, step} object or an array");
      }
      s.queries.push_back(std::move(spec));
    }
  }

  // Constructing the config runs the model-level validation (domains,
  // admissibility of the initial state).
  try {
    (void)s.to_config();
  } catch (const std::invalid_argument& e) {
    fail("$", e.what());
  }
  return s;
}

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line/column for a usable message.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SchemaError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": " + e.what());
  }
  try {
    return parse_scenario(doc);
  } catch (const SchemaError& e) {
    throw SchemaError(origin + ": " + e.what());
  }
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path.string() + ": cannot open scenario file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path.string());
}

ordered_json scenario_to_json(const Scenario& s) {
  ordered_json j;
  j["schema_version"] = 1;
  if (!s.name.empty()) j["name"] = s.name;
  if (!s.notes.empty()) j["notes"] = s.notes;
  ordered_json seg;
  seg["cell_count"] = s.cell_count;
  if (s.uniform_length) {
    seg["length_km"] = s.length_km;
  } else {
    seg["lengths_km"] = s.lengths_km;
  }
  seg["class_count"] = s.class_count;
  j["segment"] = std::move(seg);
  if (s.shared_mfd) {
    j["mfd"] = mfd_to_json(s.mfds.front());
  } else {
    ordered_json arr = ordered_json::array();
    for (const auto& m : s.mfds) arr.push_back(mfd_to_json(m));
    j["mfds"] = std::move(arr);
  }
  ordered_json bnd;
  bnd["lambda_veh_per_h"] = s.lambda_veh_h;
  bnd["nu_veh_per_h"] = s.nu_veh_h;
  j["boundary"] = std::move(bnd);
  j["initial_density_veh_per_km"] = s.initial_density;
  ordered_json run;
  run["horizon_s"] = s.run.horizon_s;
  run["snapshot_dt_s"] = s.run.snapshot_dt_s;
  run["replications"] = s.run.replications;
  run["seed"] = s.run.seed;
  j["run"] = std::move(run);
  if (!s.queries.empty()) {
    ordered_json qs = ordered_json::array();
    for (const auto& q : s.queries) {
      ordered_json qj;
      qj["origin_cell"] = q.origin_cell;
      qj["offset"] = q.offset;
      qj["class"] = q.vehicle_class;
      qj["tag_time_s"] = q.tag_time_s;
      if (q.grid_is_range) {
        ordered_json g;
        g["start"] = q.grid_start_s;
        g["stop"] = q.grid_stop_s;
        g["step"] = q.grid_step_s;
        qj["grid_s"] = std::move(g);
      } else {
        qj["grid_s"] = q.grid_explicit_s;
      }
      if (q.continuity_correction) qj["continuity_correction"] = true;
      qs.push_back(std::move(qj));
    }
    j["queries"] = std::move(qs);
  }
  return j;
}

std::string scenario_to_text(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

}  // namespace sctm
