#pragma once

#include <vector>

#include "sctm/diffusion.hpp"
#include "sctm/fluid.hpp"
#include "sctm/model.hpp"

namespace sctm {

/// Travel-time question: a class-j vehicle sits in `origin_cell` at the tag
/// time; how long until it departs cell origin_cell + offset? Evaluated on a
/// grid of candidate durations.
struct TravelTimeQuery {
  int origin_cell = 1;    ///< i, 1-based
  int offset = 0;         ///< k >= 0, destination cell is i + k
  int vehicle_class = 1;  ///< j, 1-based
  double tag_time_h = 0.0;
  std::vector<double> grid_h;  ///< durations x, nonnegative, strictly increasing
  /// Half-count continuity correction on the integer comparison; the plain
  /// Gaussian evaluation is the default.
  bool continuity_correction = false;
};

/// CDF of the travel time on the query grid. Values are clamped to [0,1] and
/// made nondecreasing; the raw violations are kept as diagnostics and must
/// stay at noise level.
struct TravelTimeDistribution {
  TravelTimeQuery query;
  std::vector<double> grid_h;
  std::vector<double> cdf;
  double max_monotonicity_violation = 0.0;  ///< largest raw CDF decrease
  double max_range_excursion = 0.0;         ///< largest raw overshoot of [0,1]

  /// Smallest grid duration with cdf >= p. Throws std::domain_error when the
  /// quantile is not bracketed by the grid (p below the first CDF value or
  /// above the last).
  double quantile(double p) const;
};

/// Evaluates P(T <= x) from the joint Gaussian approximation of the counting
/// processes: the vehicle has departed by t+x iff the departure counter at
/// boundary i+k has caught up with the entry counter at boundary i-1 frozen
/// at the tag time. Gaussian difference of the two counters; a degenerate
/// sigma yields the indicator of the mean sign.
///
/// Requires approx_y to be a Counting-process approximation with the full
/// covariance available at the tag time, and the fluid grid to cover
/// [0, tag + max x]. sigma^2 < -1e-9 raises NumericalFault.
TravelTimeDistribution travel_time_cdf(const SegmentConfig& config,
                                       const TravelTimeQuery& query,
                                       const FluidTrajectory& fluid,
                                       const GaussianApprox& approx_y,
                                       int substeps = 4);

/// Central finite differences of the CDF, clamped at zero; per hour.
/// Throws std::invalid_argument on grids with fewer than 3 points.
std::vector<double> travel_time_pdf(const TravelTimeDistribution& dist);

}  // namespace sctm
