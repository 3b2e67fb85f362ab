#pragma once

#include <vector>

#include <json.hpp>

#include "sctm/scenario.hpp"

namespace sctm {

/// Comparison of simulated moments against the deterministic mean and the
/// Gaussian standard deviation for one cell-length variant.
struct EllResult {
  double ell_km = 0.0;
  int replications = 0;
  std::vector<double> max_mean_gap;  ///< per (cell, class), max over snapshots
  double max_mean_gap_overall = 0.0;
  /// Monte-Carlo standard error of the simulated mean, max over snapshots
  /// per (cell, class); the scale against which the gaps are judged.
  std::vector<double> max_mean_se;
  /// Fraction of (snapshot, component) pairs with |fluid - sim mean| within
  /// three standard errors of the simulated mean.
  double band_coverage = 0.0;
  /// Largest relative std gap over snapshots away from MFD kinks; the
  /// denominator is floored at 0.05 veh/km so the drained tail (both stds
  /// near zero) does not dominate the ratio.
  double max_std_rel_gap = 0.0;
  int kink_free_snapshots = 0;
  /// For closed systems (no arrivals, no departure budget), the largest
  /// drift of the mean total vehicle count from its initial value.
  bool closed_system = false;
  double mass_drift_veh = 0.0;
};

struct ValidationOptions {
  std::vector<double> ell_km = {1.0, 2.0, 5.0, 10.0};
  double kink_margin_veh_km = 2.0;
  double std_floor_veh_km = 0.05;
  /// Numerical-zero slack on the coverage band: once the deterministic tail
  /// falls below a tenth of a vehicle per cell while every sampled path has
  /// drained (zero standard error), the comparison is vacuous.
  double band_floor_veh_km = 0.01;
  double coverage_threshold = 0.95;
  double std_rel_tolerance = 0.15;
  bool parallel = true;
};

struct ValidationReport {
  std::vector<EllResult> per_ell;
  bool mean_gap_monotone = false;  ///< per component, nonincreasing in ell
  bool coverage_ok = false;        ///< largest ell meets the coverage threshold
  bool std_ok = false;             ///< largest ell meets the std tolerance
  bool pass() const { return mean_gap_monotone && coverage_ok && std_ok; }
  nlohmann::ordered_json to_json() const;
};

/// Runs the cell-length sweep: the base scenario is rescaled so that all
/// cells have length ell, and horizon/snapshot step scale with ell (the
/// base acts as the ell = base-length member of the family).
ValidationReport run_validation(const Scenario& base, int replications,
                                std::uint64_t seed,
                                const ValidationOptions& options = {});

}  // namespace sctm
