#include "sctm/presets.hpp"

#include <algorithm>
#include <stdexcept>

namespace sctm {

namespace {

constexpr std::uint64_t kPresetSeed = 20250809;

MfdSpec daganzo_validation_mfd() {
  MfdSpec m;
  m.type = MfdSpec::Type::Daganzo;
  m.daganzo = {.free_flow_speed_kmh = 100.0,
               .wave_speed_kmh = 20.0,
               .capacity_veh_h = 1800.0,
               .jam_density_veh_km = 105.0};
  return m;
}

MfdSpec two_class_mfd() {
  MfdSpec m;
  m.type = MfdSpec::Type::ChanutBuisson;
  m.cb = {.car_free_flow_kmh = 108.0,
          .truck_free_flow_kmh = 79.2,
          .critical_speed_kmh = 61.2,
          .car_length_km = 0.0065,
          .truck_length_km = 0.0165,
          .lane_count = 3,
          .critical_fraction = 0.25};
  return m;
}

Scenario validation_base(double ell_km) {
  Scenario s;
  s.name = "validation-l" + std::to_string(static_cast<int>(ell_km));
  s.notes =
      "Three-cell drain through a capped exit; simulation means and standard "
      "deviations are compared against the deterministic and Gaussian "
      "approximation on this geometry.";
  s.cell_count = 3;
  s.class_count = 1;
  s.uniform_length = true;
  s.length_km = ell_km;
  s.shared_mfd = true;
  s.mfds = {daganzo_validation_mfd()};
  s.lambda_veh_h = {0.0};
  s.nu_veh_h = {900.0};
  s.initial_density = {{70.0}, {90.0}, {40.0}};
  s.run = {.horizon_s = 1000.0 * ell_km,
           .snapshot_dt_s = ell_km,
           .replications = 1000,
           .seed = kPresetSeed};
  return s;
}

Scenario closed_system() {
  Scenario s = validation_base(1.0);
  s.name = "closed-system";
  s.notes =
      "No arrivals and no departures: the total vehicle count is invariant "
      "along every sample path.";
  s.nu_veh_h = {0.0};
  s.run = {.horizon_s = 1000.0, .snapshot_dt_s = 10.0, .replications = 100,
           .seed = kPresetSeed};
  return s;
}

Scenario forward_propagation(double horizon_s) {
  Scenario s;
  s.name = "forward-propagation";
  s.notes =
      "A 3 km platoon holding 60 veh/km (20% trucks) spreads down an "
      "otherwise empty 60 km road; departures are uncapped in practice.";
  s.cell_count = 100;
  s.class_count = 2;
  s.uniform_length = true;
  s.length_km = 0.6;
  s.shared_mfd = true;
  s.mfds = {two_class_mfd()};
  s.lambda_veh_h = {0.0, 0.0};
  s.nu_veh_h = {8000.0, 4000.0};
  s.initial_density.assign(100, {0.0, 0.0});
  for (int i = 0; i < 5; ++i) s.initial_density[i] = {48.0, 12.0};
  s.run = {.horizon_s = horizon_s,
           .snapshot_dt_s = 2.0,
           .replications = 200,
           .seed = kPresetSeed};
  return s;
}

Scenario tt_example() {
  Scenario s = forward_propagation(2200.0);
  s.name = "tt-example";
  s.notes =
      "Travel-time distribution from cell 10 (tagged at 200 s) to the exit "
      "of cell 49, for both vehicle classes, on the forward-propagation "
      "geometry.";
  for (int cls = 1; cls <= 2; ++cls) {
    QuerySpec q;
    q.origin_cell = 10;
    q.offset = 39;
    q.vehicle_class = cls;
    q.tag_time_s = 200.0;
    q.grid_is_range = true;
    q.grid_start_s = 0.0;
    q.grid_stop_s = 2000.0;
    q.grid_step_s = 2.0;
    s.queries.push_back(q);
  }
  return s;
}

Scenario backward_jam() {
  Scenario s;
  s.name = "backward-jam";
  s.notes =
      "A dense block in cells 8-12 absorbs arriving traffic at its back "
      "while its front dissipates, so the jam drifts upstream. The exit cap "
      "reads the quoted 1.2 as veh/s, i.e. 4320 veh/h per class; the source "
      "value carries no unit.";
  s.cell_count = 20;
  s.class_count = 2;
  s.uniform_length = true;
  s.length_km = 1.0;
  s.shared_mfd = true;
  s.mfds = {two_class_mfd()};
  s.lambda_veh_h = {4800.0, 960.0};
  s.nu_veh_h = {4320.0, 4320.0};
  s.initial_density.assign(20, {73.0, 15.0});
  for (int i = 7; i < 12; ++i) s.initial_density[i] = {250.0, 50.0};
  s.run = {.horizon_s = 1500.0,
           .snapshot_dt_s = 1.0,
           .replications = 200,
           .seed = kPresetSeed};
  return s;
}

Scenario shocks() {
  Scenario s;
  s.name = "shocks";
  s.notes =
      "A fast dense wave (cells 5-9) catches up with a near-jam block "
      "(cells 20-24); the two merge at the back of the block while its "
      "front dissipates.";
  s.cell_count = 40;
  s.class_count = 2;
  s.uniform_length = true;
  s.length_km = 0.6;
  s.shared_mfd = true;
  s.mfds = {two_class_mfd()};
  s.lambda_veh_h = {0.0, 0.0};
  s.nu_veh_h = {8000.0, 4000.0};
  s.initial_density.assign(40, {0.0, 0.0});
  for (int i = 4; i < 9; ++i) s.initial_density[i] = {160.0, 40.0};
  for (int i = 19; i < 24; ++i) s.initial_density[i] = {280.0, 70.0};
  s.run = {.horizon_s = 500.0,
           .snapshot_dt_s = 1.0,
           .replications = 200,
           .seed = kPresetSeed};
  return s;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"closed-system", "validation-l1", "validation-l2",  "validation-l5",
          "validation-l10", "forward-propagation", "tt-example", "backward-jam",
          "shocks"};
}

bool is_preset(const std::string& name) {
  const auto names = preset_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

Scenario preset_scenario(const std::string& name) {
  if (name == "closed-system") return closed_system();
  if (name == "validation-l1") return validation_base(1.0);
  if (name == "validation-l2") return validation_base(2.0);
  if (name == "validation-l5") return validation_base(5.0);
  if (name == "validation-l10") return validation_base(10.0);
  if (name == "forward-propagation") return forward_propagation(2000.0);
  if (name == "tt-example") return tt_example();
  if (name == "backward-jam") return backward_jam();
  if (name == "shocks") return shocks();
  throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace sctm
