#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "sctm/flux.hpp"

namespace sctm {

/// Vehicle densities, length d*m, lexicographic: cell-major, class-minor.
using DensityState = std::vector<double>;
/// Per-boundary per-class rates, length (d+1)*m, boundaries indexed 0..d.
using RateVector = std::vector<double>;

/// Full description of one road segment scenario: geometry, per-boundary
/// flux models, boundary rates and the initial state. Immutable after
/// construction; shared freely between workers.
class SegmentConfig {
 public:
  /// `boundary_flux` holds d+1 models (boundaries 0..d); all must agree on
  /// the class count. Initial densities are cell-major.
  SegmentConfig(std::vector<double> lengths_km,
                std::vector<FluxModelPtr> boundary_flux,
                std::vector<double> arrival_rates_veh_h,
                std::vector<double> departure_caps_veh_h,
                DensityState initial_density);

  /// Convenience constructor sharing one flux model across all boundaries.
  SegmentConfig(std::vector<double> lengths_km, FluxModelPtr shared_flux,
                std::vector<double> arrival_rates_veh_h,
                std::vector<double> departure_caps_veh_h,
                DensityState initial_density);

  int cell_count() const { return d_; }
  int class_count() const { return m_; }
  int state_dim() const { return d_ * m_; }
  int rate_dim() const { return (d_ + 1) * m_; }

  double length_km(int cell) const { return lengths_[cell - 1]; }
  double inv_length(int cell) const { return inv_lengths_[cell - 1]; }
  const std::vector<double>& lengths_km() const { return lengths_; }
  const FluxModel& boundary_model(int boundary) const { return *flux_[boundary]; }
  FluxModelPtr boundary_model_ptr(int boundary) const { return flux_[boundary]; }
  const std::vector<double>& arrival_rates() const { return lambda_; }
  const std::vector<double>& departure_caps() const { return nu_; }
  const DensityState& initial_density() const { return rho0_; }

  /// Integer vehicle cap X^jam = floor(rho^jam * l) per (cell, class).
  long long jam_count(int cell, int cls) const {
    return jam_counts_[(cell - 1) * m_ + (cls - 1)];
  }
  const std::vector<long long>& jam_counts() const { return jam_counts_; }

  /// Initial integer counts, X(0) = round(rho(0) * l).
  std::vector<long long> initial_counts() const;

  /// Whether a density state lies in the admissible state space.
  bool admissible(std::span<const double> rho, double tol = kDensityTol) const;
  /// Whether one more class-`cls` vehicle fits into `cell` given counts for
  /// the whole segment (per-class cap and, where applicable, occupancy).
  bool cell_accepts(std::span<const long long> counts, int cell, int cls) const;

  /// Largest stable explicit step, min_i l_i / v_max (hours).
  double cfl_step_h() const;

  /// Minimum density-space distance from `rho` to any non-smooth locus of
  /// the assembled rate map (interior fluxes and boundary minima).
  double kink_distance(std::span<const double> rho) const;

  // --- index maps (1-based cells/classes, 0-based boundaries) ---
  int cell_index(int cell, int cls) const;       ///< flat index into DensityState
  int boundary_index(int boundary, int cls) const;  ///< flat index into RateVector
  std::pair<int, int> cell_of(int flat) const;   ///< inverse of cell_index
  std::pair<int, int> boundary_of(int flat) const;

 private:
  void validate() const;

  int d_ = 0;
  int m_ = 0;
  std::vector<double> lengths_;
  std::vector<double> inv_lengths_;
  std::vector<FluxModelPtr> flux_;
  std::vector<double> lambda_;
  std::vector<double> nu_;
  DensityState rho0_;
  std::vector<long long> jam_counts_;
};

/// Boundary rate vector Q(rho): entry 0 is min(lambda_j, inflow cap), interior
/// entries are the flux on the adjacent cell pair, entry d is min(nu_j,
/// outflow cap). Throws DomainError if rho leaves the state space.
RateVector assemble_rates(const SegmentConfig& config, std::span<const double> rho);

/// In-place variant writing into `out` (size (d+1)*m).
void assemble_rates(const SegmentConfig& config, std::span<const double> rho,
                    std::span<double> out);

/// Refresh only the rate entries a jump at `boundary` can change (boundaries
/// boundary-1 .. boundary+1). Identical to a full reassembly on the new state.
void local_rate_update(const SegmentConfig& config, std::span<const double> rho,
                       int boundary, std::span<double> rates);

/// Drift F(rho): component (i,j) equals (q_{i-1,j} - q_{i,j}) / l_i.
std::vector<double> drift(const SegmentConfig& config, std::span<const double> rho);
void drift(const SegmentConfig& config, std::span<const double> rho,
           std::span<double> out);
/// Drift given an already assembled rate vector.
void drift_from_rates(const SegmentConfig& config, std::span<const double> rates,
                      std::span<double> out);

/// Incidence matrix H (dm x (d+1)m) with H_kl = 1{k=l} - 1{k+m=l}; X(t) =
/// X(0) + H Y(t) and F = L H Q.
Eigen::SparseMatrix<double> structure_H(const SegmentConfig& config);
/// Diagonal of L (dm), entry (i,j) -> 1/l_i.
Eigen::VectorXd structure_L_diag(const SegmentConfig& config);

/// (d+1)m x dm matrix of partial derivatives dQ_a / d rho_b, assembled from
/// the flux models' weak gradients.
Eigen::SparseMatrix<double> rate_gradient(const SegmentConfig& config,
                                          std::span<const double> rho);

/// dF = L H dQ, the dm x dm weak Jacobian of the drift.
Eigen::SparseMatrix<double> drift_gradient(const SegmentConfig& config,
                                           std::span<const double> rho);

}  // namespace sctm
