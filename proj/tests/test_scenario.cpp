#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sctm/commands.hpp"
#include "sctm/output.hpp"
#include "sctm/presets.hpp"
#include "sctm/scenario.hpp"

using namespace sctm;

TEST_SUITE_BEGIN("scenario");

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kMinimalScenario = R"({
  "schema_version": 1,
  "name": "toy",
  "segment": {"cell_count": 2, "length_km": 1.0, "class_count": 1},
  "mfd": {"type": "daganzo", "v_f": 100.0, "w": 20.0, "q_max": 1800.0, "rho_jam": 105.0},
  "boundary": {"lambda_veh_per_h": [100.0], "nu_veh_per_h": [900.0]},
  "initial_density_veh_per_km": [[10.0], [20.0]],
  "run": {"horizon_s": 100.0, "snapshot_dt_s": 10.0, "replications": 4, "seed": 7}
})";

}  // namespace

TEST_CASE("minimal scenario parses and builds a config") {
  const Scenario s = parse_scenario_text(kMinimalScenario, "inline");
  CHECK(s.name == "toy");
  CHECK(s.cell_count == 2);
  const SegmentConfig c = s.to_config();
  CHECK(c.class_count() == 1);
  CHECK(c.arrival_rates()[0] == 100.0);
}

TEST_CASE("canonical serialization round-trips") {
  for (const auto& name : preset_names()) {
    const Scenario s = preset_scenario(name);
    const std::string text = scenario_to_text(s);
    const Scenario reparsed = parse_scenario_text(text, name);
    CHECK(scenario_to_text(reparsed) == text);
  }
  const Scenario s = parse_scenario_text(kMinimalScenario, "inline");
  const Scenario reparsed = parse_scenario_text(scenario_to_text(s), "inline2");
  CHECK(scenario_to_text(reparsed) == scenario_to_text(s));
}

TEST_CASE("unknown fields are rejected with their path") {
  nlohmann::json doc = nlohmann::json::parse(kMinimalScenario);
  doc["segment"]["surprise"] = 1;
  CHECK_THROWS_WITH_AS(parse_scenario(doc),
                       doctest::Contains("unknown field 'surprise'"), SchemaError);
}

TEST_CASE("schema violations carry precise messages") {
  nlohmann::json doc = nlohmann::json::parse(kMinimalScenario);
  SUBCASE("missing block") {
    doc.erase("boundary");
    CHECK_THROWS_WITH_AS(parse_scenario(doc), doctest::Contains("boundary"), SchemaError);
  }
  SUBCASE("wrong type") {
    doc["run"]["horizon_s"] = "long";
    CHECK_THROWS_WITH_AS(parse_scenario(doc), doctest::Contains("$.run.horizon_s"),
                         SchemaError);
  }
  SUBCASE("negative seed") {
    doc["run"]["seed"] = -4;
    CHECK_THROWS_AS(parse_scenario(doc), SchemaError);
  }
  SUBCASE("class count mismatch") {
    doc["boundary"]["lambda_veh_per_h"] = {1.0, 2.0};
    CHECK_THROWS_AS(parse_scenario(doc), SchemaError);
  }
  SUBCASE("initial density above jam") {
    doc["initial_density_veh_per_km"][0][0] = 500.0;
    CHECK_THROWS_AS(parse_scenario(doc), SchemaError);
  }
  SUBCASE("malformed query grid") {
    doc["queries"] = {{{"origin_cell", 1},
                       {"offset", 0},
                       {"class", 1},
                       {"tag_time_s", 0.0},
                       {"grid_s", {{"start", 10.0}, {"stop", 0.0}, {"step", 2.0}}}}};
    CHECK_THROWS_WITH_AS(parse_scenario(doc), doctest::Contains("grid_s"), SchemaError);
  }
}

TEST_CASE("syntax errors report line and column") {
  try {
    parse_scenario_text("{\n  \"schema_version\": 1,\n  oops\n}", "broken.json");
    FAIL("expected a SchemaError");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("broken.json:3") != std::string::npos);
  }
}

TEST_CASE("bundled presets parse, validate, and match the files on disk") {
  const std::filesystem::path dir = std::filesystem::path(SCTM_SOURCE_DIR) / "scenarios";
  for (const auto& name : preset_names()) {
    const Scenario s = preset_scenario(name);
    CHECK(s.name == name);
    CHECK_NOTHROW(s.to_config());
    const auto file = dir / (name + ".json");
    REQUIRE_MESSAGE(std::filesystem::exists(file),
                    "missing scenario file (regenerate with sctm_dump_presets): ",
                    file.string());
    CHECK_MESSAGE(slurp(file) == scenario_to_text(s),
                  "scenario file out of date: ", file.string());
  }
  CHECK_THROWS_AS(preset_scenario("no-such"), std::invalid_argument);
}

TEST_CASE("per-boundary MFD arrays parse and serialize") {
  nlohmann::json doc = nlohmann::json::parse(kMinimalScenario);
  doc.erase("mfd");
  nlohmann::json narrow = {{"type", "daganzo"}, {"v_f", 80.0}, {"w", 15.0},
                           {"q_max", 1500.0},   {"rho_jam", 100.0}};
  nlohmann::json wide = {{"type", "daganzo"}, {"v_f", 100.0}, {"w", 20.0},
                         {"q_max", 1800.0},  {"rho_jam", 105.0}};
  doc["mfds"] = {wide, narrow, wide};
  const Scenario s = parse_scenario(doc);
  CHECK(!s.shared_mfd);
  REQUIRE(s.mfds.size() == 3);
  const SegmentConfig c = s.to_config();
  CHECK(c.boundary_model(1).max_class_flow_veh_h(0) == 1500.0);
  CHECK(c.boundary_model(2).max_class_flow_veh_h(0) == 1800.0);
  // jam caps come from the stricter neighbor
  CHECK(c.jam_count(1, 1) == 100);
  const Scenario reparsed = parse_scenario_text(scenario_to_text(s), "inline");
  CHECK(scenario_to_text(reparsed) == scenario_to_text(s));

  doc["mfds"] = {wide, narrow};  // wrong count
  CHECK_THROWS_WITH_AS(parse_scenario(doc), doctest::Contains("d+1"), SchemaError);
}

TEST_CASE("range grids expand inclusively") {
  QuerySpec q;
  q.grid_is_range = true;
  q.grid_start_s = 0.0;
  q.grid_stop_s = 10.0;
  q.grid_step_s = 2.0;
  const auto g = q.grid_s();
  REQUIRE(g.size() == 6);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 10.0);
}

TEST_CASE("simulate command writes deterministic files") {
  const Scenario s = parse_scenario_text(kMinimalScenario, "inline");
  const auto base = std::filesystem::temp_directory_path() / "sctm_test_cmd";
  std::filesystem::remove_all(base);
  const ResultBundle a = cmd_simulate(s, base / "a");
  const ResultBundle b = cmd_simulate(s, base / "b");
  REQUIRE(!a.files.empty());
  for (const auto& f : a.files) {
    if (f == "metadata.json") continue;  // carries wall time
    CHECK_MESSAGE(slurp(base / "a" / f) == slurp(base / "b" / f), "file differs: ", f);
  }
  // overriding the seed must change the sampled tables
  CommandOverrides o;
  o.seed = 99;
  const ResultBundle c = cmd_simulate(s, base / "c", o);
  CHECK(slurp(base / "a" / "sim_mean.csv") != slurp(base / "c" / "sim_mean.csv"));
  std::filesystem::remove_all(base);
}

TEST_CASE("empty-road scenario produces an all-zero table") {
  Scenario s = parse_scenario_text(kMinimalScenario, "inline");
  s.lambda_veh_h = {0.0};
  s.initial_density = {{0.0}, {0.0}};
  const auto base = std::filesystem::temp_directory_path() / "sctm_test_zero";
  std::filesystem::remove_all(base);
  cmd_simulate(s, base);
  std::istringstream csv(slurp(base / "sim_mean.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "time_s,cell,class,value,unit");
  int rows = 0;
  while (std::getline(csv, line)) {
    CHECK(line.find(",0,veh/km") != std::string::npos);
    ++rows;
  }
  CHECK(rows == 11 * 2);
  std::filesystem::remove_all(base);
}

TEST_CASE("traveltime command without queries is a no-op") {
  const Scenario s = parse_scenario_text(kMinimalScenario, "inline");
  const auto base = std::filesystem::temp_directory_path() / "sctm_test_noq";
  std::filesystem::remove_all(base);
  const ResultBundle bundle = cmd_traveltime(s, base);
  CHECK(bundle.files == std::vector<std::string>{"metadata.json"});
  std::filesystem::remove_all(base);
}

TEST_CASE("number formatting is stable") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(1.5) == "1.5");
  CHECK(format_number(1e-12) == "1e-12");
  CHECK(format_number(123456789.25) == "123456789.25");
}

TEST_SUITE_END();
