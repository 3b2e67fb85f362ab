#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sctm {

/// Thrown when a density argument lies outside the admissible state space.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Absolute slack (veh/km) tolerated on density domain checks. Densities
/// within this distance outside the domain are clamped before evaluation;
/// anything further out raises DomainError.
inline constexpr double kDensityTol = 1e-6;

// ---------------------------------------------------------------------------
// Triangular single-class fundamental diagram (sending/receiving form)
// ---------------------------------------------------------------------------

struct DaganzoParams {
  double free_flow_speed_kmh = 0.0;  ///< v^f
  double wave_speed_kmh = 0.0;       ///< w, speed at which jams move upstream
  double capacity_veh_h = 0.0;       ///< q^max
  double jam_density_veh_km = 0.0;   ///< rho^jam

  /// Throws std::invalid_argument unless all fields are positive,
  /// w <= v^f and the sending function attains capacity within the domain.
  void validate() const;
};

/// S(rho) = min(v^f rho, q^max).
double daganzo_sending(double rho, const DaganzoParams& p);
/// R(rho) = min(w (rho^jam - rho), q^max).
double daganzo_receiving(double rho, const DaganzoParams& p);
/// Interface flow min(S(rho_up), R(rho_down)).
double daganzo_flux(double rho_up, double rho_down, const DaganzoParams& p);

// ---------------------------------------------------------------------------
// Two-class (cars/trucks) fundamental diagram
// ---------------------------------------------------------------------------

struct CbParams {
  double car_free_flow_kmh = 0.0;    ///< v^f_1
  double truck_free_flow_kmh = 0.0;  ///< v^f_2
  double critical_speed_kmh = 0.0;   ///< v^c
  double car_length_km = 0.0;        ///< L_1
  double truck_length_km = 0.0;      ///< L_2
  int lane_count = 0;                ///< N
  double critical_fraction = 0.0;    ///< beta, critical-density fraction

  /// Truck length in passenger-car equivalents, e = L_2 / L_1.
  double pce() const { return truck_length_km / car_length_km; }
  /// Road-space occupancy rho_1 L_1 + rho_2 L_2 (dimensionless per km).
  double occupancy(double rho1, double rho2) const {
    return rho1 * car_length_km + rho2 * truck_length_km;
  }
  /// Capacity constant C = v^c beta N / L_1 (PCE flow at the critical point).
  double capacity_pce_veh_h() const {
    return critical_speed_kmh * critical_fraction * lane_count / car_length_km;
  }
  void validate() const;
};

enum class CbRegime { FreeFlow, Congested };

/// Per-class flows and speeds of a single cell state.
struct CbFlows {
  double car_flow_veh_h = 0.0;
  double truck_flow_veh_h = 0.0;
  double car_speed_kmh = 0.0;
  double truck_speed_kmh = 0.0;
};

/// Composition-dependent jamming density N (rho1+rho2) / (rho1 L1 + rho2 L2).
/// Throws DomainError for the degenerate empty state.
double cb_jam_density(double rho1, double rho2, const CbParams& p);

/// Free-flow iff rho1 + rho2 <= beta * jam density; equivalently occupancy
/// <= beta N, which also classifies the empty state as free-flow.
CbRegime cb_regime(double rho1, double rho2, const CbParams& p);

/// Class flows of one cell. Free flow: per-class speeds interpolate linearly
/// in occupancy between v^f_i and v^c. Congestion: both classes share the
/// speed of the linearly decreasing PCE flow. The empty state reports zero
/// flows at free-flow speeds.
CbFlows cb_class_flows(double rho1, double rho2, const CbParams& p);

struct CbCellState {
  double rho1 = 0.0;
  double rho2 = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
};

/// Speed of the discontinuity between a free-flowing upstream state and a
/// congested downstream state (PCE-weighted Rankine-Hugoniot quotient).
/// A vanishing PCE-density gap cannot occur between distinct regimes; if it
/// is hit anyway the caller falls back to the s >= 0 branch.
double cb_shock_speed(const CbCellState& up, const CbCellState& dn, const CbParams& p);

/// Two-class interface flow, writing q = (q1, q2) veh/h into `out`.
void cb_flux(std::span<const double> up, std::span<const double> dn, const CbParams& p,
             std::span<double> out);

// ---------------------------------------------------------------------------
// Pluggable discrete flux-function
// ---------------------------------------------------------------------------

/// A discrete flux-function between two neighboring cells, evaluated on the
/// per-class densities of both cells. Immutable after construction; all
/// methods are pure and safe to call concurrently.
///
/// Gradient convention at non-smooth points: each partial derivative is the
/// one-sided derivative of the branch that becomes active for an
/// infinitesimal increase of that density, clamped to +-lipschitz_bound().
class FluxModel {
 public:
  virtual ~FluxModel() = default;

  int class_count() const { return class_count_; }
  /// Declared Lipschitz bound of the flux map (veh/h per veh/km).
  double lipschitz_bound() const { return lipschitz_bound_; }
  /// Fastest kinematic wave speed (km/h); sets the CFL step bound.
  virtual double max_wave_speed_kmh() const = 0;
  /// Largest possible class flow q^max_j (veh/h).
  virtual double max_class_flow_veh_h(int cls) const = 0;
  /// Per-class density cap of a single cell (pure-class cap when the jam
  /// density is composition-dependent).
  virtual double class_jam_density(int cls) const = 0;
  /// Whether a cell state satisfies the jam/occupancy constraint.
  virtual bool cell_admissible(std::span<const double> rho, double tol) const = 0;

  /// Flux vector (veh/h); `out` has class_count() entries.
  virtual void eval(std::span<const double> up, std::span<const double> dn,
                    std::span<double> out) const = 0;
  /// Partial derivatives, row-major m x 2m: entry [j][k] is dq_j/d rho_up_k,
  /// entry [j][m+k] is dq_j/d rho_dn_k.
  virtual void gradient(std::span<const double> up, std::span<const double> dn,
                        std::span<double> out) const = 0;

  /// sup over upstream states of the class-j flux into a first cell with
  /// densities `dn_first` (closed form per MFD).
  virtual void inflow_cap(std::span<const double> dn_first, std::span<double> out) const = 0;
  /// m x m row-major derivative of inflow_cap w.r.t. the first-cell densities.
  virtual void inflow_cap_gradient(std::span<const double> dn_first,
                                   std::span<double> out) const = 0;
  /// sup over downstream states of the class-j flux out of a last cell.
  virtual void outflow_cap(std::span<const double> up_last, std::span<double> out) const = 0;
  virtual void outflow_cap_gradient(std::span<const double> up_last,
                                    std::span<double> out) const = 0;

  /// Density-space distance (veh/km) from (up, dn) to the nearest non-smooth
  /// locus of eval(). Conservative estimate.
  virtual double kink_distance(std::span<const double> up,
                               std::span<const double> dn) const = 0;
  /// Distance to the non-smooth loci of rho -> min(lambda, inflow_cap(rho)).
  virtual double inflow_kink_distance(std::span<const double> dn_first,
                                      std::span<const double> lambda) const = 0;
  virtual double outflow_kink_distance(std::span<const double> up_last,
                                       std::span<const double> nu) const = 0;

 protected:
  FluxModel(int class_count, double lipschitz_bound)
      : class_count_(class_count), lipschitz_bound_(lipschitz_bound) {}

 private:
  int class_count_;
  double lipschitz_bound_;
};

class DaganzoFlux final : public FluxModel {
 public:
  explicit DaganzoFlux(const DaganzoParams& p);

  const DaganzoParams& params() const { return params_; }

  double max_wave_speed_kmh() const override;
  double max_class_flow_veh_h(int cls) const override;
  double class_jam_density(int cls) const override;
  bool cell_admissible(std::span<const double> rho, double tol) const override;
  void eval(std::span<const double> up, std::span<const double> dn,
            std::span<double> out) const override;
  void gradient(std::span<const double> up, std::span<const double> dn,
                std::span<double> out) const override;
  void inflow_cap(std::span<const double> dn_first, std::span<double> out) const override;
  void inflow_cap_gradient(std::span<const double> dn_first,
                           std::span<double> out) const override;
  void outflow_cap(std::span<const double> up_last, std::span<double> out) const override;
  void outflow_cap_gradient(std::span<const double> up_last,
                            std::span<double> out) const override;
  double kink_distance(std::span<const double> up,
                       std::span<const double> dn) const override;
  double inflow_kink_distance(std::span<const double> dn_first,
                              std::span<const double> lambda) const override;
  double outflow_kink_distance(std::span<const double> up_last,
                               std::span<const double> nu) const override;

 private:
  double checked(double rho) const;
  DaganzoParams params_;
};

class CbFlux final : public FluxModel {
 public:
  explicit CbFlux(const CbParams& p);

  const CbParams& params() const { return params_; }

  double max_wave_speed_kmh() const override;
  double max_class_flow_veh_h(int cls) const override;
  double class_jam_density(int cls) const override;
  bool cell_admissible(std::span<const double> rho, double tol) const override;
  void eval(std::span<const double> up, std::span<const double> dn,
            std::span<double> out) const override;
  void gradient(std::span<const double> up, std::span<const double> dn,
                std::span<double> out) const override;
  void inflow_cap(std::span<const double> dn_first, std::span<double> out) const override;
  void inflow_cap_gradient(std::span<const double> dn_first,
                           std::span<double> out) const override;
  void outflow_cap(std::span<const double> up_last, std::span<double> out) const override;
  void outflow_cap_gradient(std::span<const double> up_last,
                            std::span<double> out) const override;
  double kink_distance(std::span<const double> up,
                       std::span<const double> dn) const override;
  double inflow_kink_distance(std::span<const double> dn_first,
                              std::span<const double> lambda) const override;
  double outflow_kink_distance(std::span<const double> up_last,
                               std::span<const double> nu) const override;

 private:
  void checked(std::span<const double> rho, double clamped[2]) const;
  CbParams params_;
};

using FluxModelPtr = std::shared_ptr<const FluxModel>;

FluxModelPtr make_daganzo(const DaganzoParams& p);
FluxModelPtr make_chanut_buisson(const CbParams& p);

}  // namespace sctm
