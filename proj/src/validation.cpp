#include "sctm/validation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sctm/ctmc.hpp"
#include "sctm/diffusion.hpp"
#include "sctm/fluid.hpp"

namespace sctm {

namespace {

Scenario rescale(const Scenario& base, double ell_km) {
  if (!base.uniform_length) {
    throw std::invalid_argument("validation sweep: base scenario must have uniform cells");
  }
  Scenario s = base;
  const double factor = ell_km / base.length_km;
  s.length_km = ell_km;
  s.run.horizon_s = base.run.horizon_s * factor;
  s.run.snapshot_dt_s = base.run.snapshot_dt_s * factor;
  return s;
}

EllResult evaluate_ell(const Scenario& scenario, int replications, std::uint64_t seed,
                       const ValidationOptions& opt) {
  const SegmentConfig config = scenario.to_config();
  const double horizon = scenario.horizon_h();
  const double dt = scenario.snapshot_dt_h();

  ReplicateOptions ropt;
  ropt.parallel = opt.parallel;
  const MomentEstimate sim = replicate(config, horizon, dt, replications, seed, ropt);

  const FluidTrajectory fluid = solve_fluid(config, horizon, dt);
  CovarianceOptions copt;
  copt.store_full = false;
  copt.parallel = opt.parallel;
  const GaussianApprox approx = solve_covariance_rho(config, fluid, copt);

  const int dm = config.state_dim();
  const int snapshots = static_cast<int>(sim.time_h.size());
  const double r = static_cast<double>(replications);

  EllResult res;
  res.ell_km = scenario.length_km;
  res.replications = replications;
  res.max_mean_gap.assign(dm, 0.0);
  res.max_mean_se.assign(dm, 0.0);

  long long covered = 0;
  for (int k = 0; k < snapshots; ++k) {
    const double kink_dist = config.kink_distance(fluid.rho[k]);
    const bool kink_free = kink_dist > opt.kink_margin_veh_km;
    if (kink_free) ++res.kink_free_snapshots;
    for (int a = 0; a < dm; ++a) {
      const double fluid_mean = fluid.rho[k][a];
      const double gap = std::abs(sim.mean[k * dm + a] - fluid_mean);
      res.max_mean_gap[a] = std::max(res.max_mean_gap[a], gap);
      const double se = sim.stddev[k * dm + a] / std::sqrt(r);
      res.max_mean_se[a] = std::max(res.max_mean_se[a], se);
      if (gap <= 3.0 * se + opt.band_floor_veh_km) ++covered;
      if (kink_free) {
        const double approx_std = std::sqrt(std::max(0.0, approx.diag_v[k][a]));
        const double sim_std = sim.stddev[k * dm + a];
        const double rel = std::abs(sim_std - approx_std) /
                           std::max(approx_std, opt.std_floor_veh_km);
        res.max_std_rel_gap = std::max(res.max_std_rel_gap, rel);
      }
    }
  }
  res.max_mean_gap_overall =
      *std::max_element(res.max_mean_gap.begin(), res.max_mean_gap.end());
  res.band_coverage =
      static_cast<double>(covered) / (static_cast<double>(snapshots) * dm);

  const auto& lam = config.arrival_rates();
  const auto& nu = config.departure_caps();
  res.closed_system =
      std::all_of(lam.begin(), lam.end(), [](double v) { return v == 0.0; }) &&
      std::all_of(nu.begin(), nu.end(), [](double v) { return v == 0.0; });
  if (res.closed_system) {
    auto total = [&](int k) {
      double mass = 0.0;
      for (int i = 1; i <= config.cell_count(); ++i) {
        for (int j = 1; j <= config.class_count(); ++j) {
          mass += config.length_km(i) * sim.mean[k * dm + config.cell_index(i, j)];
        }
      }
      return mass;
    };
    const double mass0 = total(0);
    for (int k = 1; k < snapshots; ++k) {
      res.mass_drift_veh = std::max(res.mass_drift_veh, std::abs(total(k) - mass0));
    }
  }
  return res;
}

}  // namespace

ValidationReport run_validation(const Scenario& base, int replications,
                                std::uint64_t seed, const ValidationOptions& options) {
  if (options.ell_km.empty()) {
    throw std::invalid_argument("validation sweep: empty cell-length list");
  }
  ValidationReport report;
  for (double ell : options.ell_km) {
    report.per_ell.push_back(evaluate_ell(rescale(base, ell), replications, seed, options));
  }
  report.mean_gap_monotone = true;
  for (std::size_t e = 1; e < report.per_ell.size(); ++e) {
    const auto& prev = report.per_ell[e - 1].max_mean_gap;
    const auto& cur = report.per_ell[e].max_mean_gap;
    for (std::size_t a = 0; a < cur.size(); ++a) {
      if (cur[a] > prev[a]) report.mean_gap_monotone = false;
    }
  }
  const EllResult& last = report.per_ell.back();
  report.coverage_ok = last.band_coverage >= options.coverage_threshold;
  report.std_ok = last.max_std_rel_gap <= options.std_rel_tolerance;
  return report;
}

nlohmann::ordered_json ValidationReport::to_json() const {
  nlohmann::ordered_json j;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : per_ell) {
    nlohmann::ordered_json ej;
    ej["ell_km"] = e.ell_km;
    ej["replications"] = e.replications;
    ej["max_mean_gap_veh_per_km"] = e.max_mean_gap;
    ej["max_mean_gap_overall_veh_per_km"] = e.max_mean_gap_overall;
    ej["max_mean_se_veh_per_km"] = e.max_mean_se;
    ej["band_coverage"] = e.band_coverage;
    ej["max_std_rel_gap"] = e.max_std_rel_gap;
    ej["kink_free_snapshots"] = e.kink_free_snapshots;
    if (e.closed_system) ej["mass_drift_veh"] = e.mass_drift_veh;
    arr.push_back(std::move(ej));
  }
  j["per_ell"] = std::move(arr);
  j["checks"] = {{"mean_gap_monotone", mean_gap_monotone},
                 {"coverage_ok", coverage_ok},
                 {"std_ok", std_ok}};
  j["pass"] = pass();
  return j;
}

}  // namespace sctm
