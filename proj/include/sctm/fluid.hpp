#pragma once

#include <vector>

#include "sctm/model.hpp"

namespace sctm {

/// Deterministic first-order trajectory: densities and cumulative boundary
/// counts on a common output grid.
struct FluidTrajectory {
  std::vector<double> time_h;
  std::vector<DensityState> rho;        ///< per grid point, d*m
  std::vector<std::vector<double>> y;   ///< per grid point, (d+1)*m, nondecreasing
  double internal_step_h = 0.0;

  int grid_index(double t_h) const;     ///< exact grid lookup, throws if absent
};

struct FluidOptions {
  /// Internal RK4 step = output_dt / ceil(output_dt / (cfl / substeps)).
  /// The default keeps |step * drift gradient| small enough that halving the
  /// step moves smooth stretches by less than 1e-6 relative.
  int substeps = 16;
};

/// Integrates d rho/dt = L H Q(rho) jointly with dY/dt = Q(rho) by classical
/// RK4 with a fixed step bounded by the CFL condition, sampling every
/// output_dt. Throws std::invalid_argument on a nonpositive horizon and
/// DomainError if the CFL bound degenerates.
FluidTrajectory solve_fluid(const SegmentConfig& config, double horizon_h,
                            double output_dt_h, const FluidOptions& options = {});

/// Variant starting from an arbitrary admissible state instead of the
/// config's initial density.
FluidTrajectory solve_fluid_from(const SegmentConfig& config, const DensityState& rho0,
                                 double horizon_h, double output_dt_h,
                                 const FluidOptions& options = {});

/// One explicit (Godunov/Euler) step rho + dt * F(rho). Throws DomainError if
/// dt exceeds the CFL bound.
DensityState godunov_step(const SegmentConfig& config, const DensityState& rho,
                          double dt_h);

}  // namespace sctm
