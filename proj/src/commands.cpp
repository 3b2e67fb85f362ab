#include "sctm/commands.hpp"

#include <chrono>
#include <fstream>

#include "sctm/ctmc.hpp"
#include "sctm/diffusion.hpp"
#include "sctm/fluid.hpp"
#include "sctm/validation.hpp"
#include "sctm/version.hpp"

namespace sctm {

namespace {

using Clock = std::chrono::steady_clock;

ResultBundle make_bundle(const Scenario& scenario, const std::string& command,
                         const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  ResultBundle bundle;
  bundle.out_dir = out_dir;
  bundle.metadata["tool"] = "sctm";
  bundle.metadata["version"] = kVersion;
  bundle.metadata["command"] = command;
  bundle.metadata["scenario"] = scenario.name.empty() ? "(unnamed)" : scenario.name;
  bundle.metadata["seed_scheme"] = kSeedScheme;
  return bundle;
}

void finish(ResultBundle& bundle, Clock::time_point started) {
  const auto elapsed = std::chrono::duration<double>(Clock::now() - started).count();
  bundle.metadata["wall_time_s"] = elapsed;
  write_metadata(bundle);
}

std::vector<double> flatten_grid(const std::vector<DensityState>& grid) {
  std::vector<double> flat;
  if (grid.empty()) return flat;
  flat.reserve(grid.size() * grid.front().size());
  for (const auto& v : grid) flat.insert(flat.end(), v.begin(), v.end());
  return flat;
}

}  // namespace

ResultBundle cmd_simulate(const Scenario& scenario, const std::filesystem::path& out_dir,
                          const CommandOverrides& overrides) {
  const auto started = Clock::now();
  ResultBundle bundle = make_bundle(scenario, "simulate", out_dir);
  const SegmentConfig config = scenario.to_config();
  const std::uint64_t seed = overrides.seed.value_or(scenario.run.seed);
  const int reps = overrides.replications.value_or(scenario.run.replications);

  ReplicateOptions ropt;
  ropt.parallel = overrides.parallel;
  const MomentEstimate est =
      replicate(config, scenario.horizon_h(), scenario.snapshot_dt_h(), reps, seed, ropt);

  const int d = config.cell_count();
  const int m = config.class_count();
  write_cell_table(out_dir / "sim_mean.csv", est.time_h, d, m, est.mean, "veh/km");
  bundle.files.push_back("sim_mean.csv");
  write_cell_table(out_dir / "sim_std.csv", est.time_h, d, m, est.stddev, "veh/km");
  bundle.files.push_back("sim_std.csv");
  write_boundary_table(out_dir / "sim_y_mean.csv", est.time_h, d + 1, m, est.y_mean, "veh");
  bundle.files.push_back("sim_y_mean.csv");
  write_boundary_table(out_dir / "sim_y_std.csv", est.time_h, d + 1, m, est.y_stddev, "veh");
  bundle.files.push_back("sim_y_std.csv");

  bundle.metadata["base_seed"] = seed;
  bundle.metadata["replications"] = reps;
  finish(bundle, started);
  return bundle;
}

ResultBundle cmd_approximate(const Scenario& scenario,
                             const std::filesystem::path& out_dir,
                             const CommandOverrides& overrides) {
  const auto started = Clock::now();
  ResultBundle bundle = make_bundle(scenario, "approximate", out_dir);
  const SegmentConfig config = scenario.to_config();

  const FluidTrajectory fluid =
      solve_fluid(config, scenario.horizon_h(), scenario.snapshot_dt_h());
  CovarianceOptions copt;
  copt.store_full = false;
  copt.parallel = overrides.parallel;
  const GaussianApprox rho_approx = solve_covariance_rho(config, fluid, copt);
  const GaussianApprox y_approx = solve_covariance_y(config, fluid, copt);

  const int d = config.cell_count();
  const int m = config.class_count();
  write_cell_table(out_dir / "fluid_mean.csv", fluid.time_h, d, m,
                   flatten_grid(fluid.rho), "veh/km");
  bundle.files.push_back("fluid_mean.csv");
  write_boundary_table(out_dir / "fluid_y_mean.csv", fluid.time_h, d + 1, m,
                       flatten_grid(fluid.y), "veh");
  bundle.files.push_back("fluid_y_mean.csv");

  auto stds = [](const GaussianApprox& g) {
    std::vector<double> out;
    out.reserve(g.diag_v.size() * g.dim);
    for (const auto& dv : g.diag_v) {
      for (int a = 0; a < g.dim; ++a) out.push_back(std::sqrt(std::max(0.0, dv[a])));
    }
    return out;
  };
  write_cell_table(out_dir / "diffusion_std.csv", fluid.time_h, d, m, stds(rho_approx),
                   "veh/km");
  bundle.files.push_back("diffusion_std.csv");
  write_boundary_table(out_dir / "diffusion_y_std.csv", fluid.time_h, d + 1, m,
                       stds(y_approx), "veh");
  bundle.files.push_back("diffusion_y_std.csv");

  finish(bundle, started);
  return bundle;
}

ResultBundle cmd_traveltime(const Scenario& scenario,
                            const std::filesystem::path& out_dir,
                            const CommandOverrides& overrides) {
  const auto started = Clock::now();
  ResultBundle bundle = make_bundle(scenario, "traveltime", out_dir);
  if (scenario.queries.empty()) {
    bundle.metadata["queries"] = 0;
    finish(bundle, started);
    return bundle;
  }
  const SegmentConfig config = scenario.to_config();

  // The fluid grid must reach every tag time + duration; check up front so
  // a bad query reads as a scenario error rather than a numeric one.
  double needed_s = 0.0;
  for (const auto& q : scenario.queries) {
    needed_s = std::max(needed_s, q.tag_time_s + q.grid_s().back());
  }
  if (needed_s > scenario.run.horizon_s + 1e-9) {
    throw SchemaError("queries reach " + std::to_string(needed_s) +
                      " s but the run horizon is " + std::to_string(scenario.run.horizon_s) +
                      " s");
  }

  const FluidTrajectory fluid =
      solve_fluid(config, scenario.horizon_h(), scenario.snapshot_dt_h());
  CovarianceOptions copt;
  copt.store_full = false;
  copt.parallel = overrides.parallel;
  for (const auto& q : scenario.queries) {
    copt.checkpoint_times_h.push_back(q.tag_time_s / 3600.0);
  }
  const GaussianApprox y_approx = solve_covariance_y(config, fluid, copt);

  std::vector<TravelTimeDistribution> dists;
  nlohmann::ordered_json medians = nlohmann::ordered_json::array();
  for (const auto& spec : scenario.queries) {
    dists.push_back(travel_time_cdf(config, spec.to_query(), fluid, y_approx));
    const auto& dist = dists.back();
    nlohmann::ordered_json mj;
    mj["origin_cell"] = spec.origin_cell;
    mj["destination_cell"] = spec.origin_cell + spec.offset;
    mj["class"] = spec.vehicle_class;
    if (dist.cdf.front() <= 0.5 && dist.cdf.back() >= 0.5) {
      mj["median_s"] = dist.quantile(0.5) * 3600.0;
    }
    medians.push_back(std::move(mj));
  }
  write_traveltime_table(out_dir / "traveltime_cdf.csv", dists, /*pdf=*/false);
  bundle.files.push_back("traveltime_cdf.csv");
  write_traveltime_table(out_dir / "traveltime_pdf.csv", dists, /*pdf=*/true);
  bundle.files.push_back("traveltime_pdf.csv");

  bundle.metadata["queries"] = scenario.queries.size();
  bundle.metadata["medians"] = std::move(medians);
  finish(bundle, started);
  return bundle;
}

int cmd_validate(const Scenario& scenario, const std::filesystem::path& out_dir,
                 const CommandOverrides& overrides) {
  const auto started = Clock::now();
  ResultBundle bundle = make_bundle(scenario, "validate", out_dir);
  const std::uint64_t seed = overrides.seed.value_or(scenario.run.seed);
  const int reps = overrides.replications.value_or(scenario.run.replications);

  ValidationOptions vopt;
  vopt.parallel = overrides.parallel;
  const ValidationReport report = run_validation(scenario, reps, seed, vopt);

  {
    std::ofstream out(out_dir / "report.json", std::ios::binary);
    out << report.to_json().dump(2) << '\n';
    bundle.files.push_back("report.json");
  }
  // The same numbers in plottable long form.
  {
    std::ofstream out(out_dir / "validate_gaps.csv", std::ios::binary);
    out << "ell_km,cell,class,max_mean_gap_veh_per_km\n";
    const int m = scenario.class_count;
    for (const auto& e : report.per_ell) {
      for (std::size_t a = 0; a < e.max_mean_gap.size(); ++a) {
        out << format_number(e.ell_km) << ',' << (a / m + 1) << ',' << (a % m + 1) << ','
            << format_number(e.max_mean_gap[a]) << '\n';
      }
    }
    bundle.files.push_back("validate_gaps.csv");
  }
  bundle.metadata["base_seed"] = seed;
  bundle.metadata["replications"] = reps;
  bundle.metadata["pass"] = report.pass();
  finish(bundle, started);
  return report.pass() ? kExitOk : kExitValidation;
}

}  // namespace sctm
