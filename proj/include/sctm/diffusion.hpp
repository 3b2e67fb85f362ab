#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "sctm/fluid.hpp"
#include "sctm/model.hpp"

namespace sctm {

/// Raised when an integration produces an inconsistent second moment
/// (negative variance, PSD violation, singular fundamental matrix).
class NumericalFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProcessKind { Density, Counting };

/// Gaussian second-order approximation around a fluid trajectory. The mean
/// path is the fluid solution itself (the centered mean M(t) of the linear
/// SDE vanishes for an exact initial state); V is the covariance, Phi the
/// fundamental matrix of the linearized drift.
struct GaussianApprox {
  ProcessKind kind = ProcessKind::Density;
  int dim = 0;
  std::vector<double> time_h;
  std::vector<Eigen::VectorXd> mean;     ///< fluid rho (Density) or Y (Counting)
  std::vector<Eigen::VectorXd> diag_v;   ///< diagonal of V at every grid point
  /// Boundary rates Q(rho(t)) along the mean path; their square roots are
  /// the diagonal diffusion factors feeding the noise term.
  std::vector<Eigen::VectorXd> rates_veh_h;
  std::vector<Eigen::MatrixXd> v;        ///< full V grid (empty unless stored)
  std::vector<Eigen::MatrixXd> phi;      ///< fundamental matrix grid (optional)
  std::vector<double> trace_integral;    ///< integral of tr dF ds (with phi)
  std::map<int, Eigen::MatrixXd> v_checkpoints;  ///< grid index -> V

  bool has_full_v() const { return !v.empty(); }
  bool has_phi() const { return !phi.empty(); }
  int grid_index(double t_h) const;
  /// Full covariance at a grid time, from the stored grid or a checkpoint.
  const Eigen::MatrixXd& v_at(double t_h) const;
  double std_at(double t_h, int flat) const;
};

struct CovarianceOptions {
  /// Internal step divides the CFL bound by this factor.
  int substeps = 4;
  bool store_full = true;
  bool store_fundamental = false;
  /// Grid times at which V is kept even when store_full is off.
  std::vector<double> checkpoint_times_h;
  bool parallel = true;
};

/// Covariance of the density process: RK4 on dV/dt = dF V + V dF^T +
/// (L H Sigma)(L H Sigma)^T along the fluid mean path, V(0) = 0, V
/// symmetrized after every step.
GaussianApprox solve_covariance_rho(const SegmentConfig& config,
                                    const FluidTrajectory& fluid,
                                    const CovarianceOptions& options = {});

/// Covariance of the boundary counting processes on the (d+1)m-dimensional
/// system dV/dt = dh V + V dh^T + diag(Q), with dh = dQ L H.
GaussianApprox solve_covariance_y(const SegmentConfig& config,
                                  const FluidTrajectory& fluid,
                                  const CovarianceOptions& options = {});

struct FundamentalSolution {
  std::vector<double> time_h;
  std::vector<Eigen::MatrixXd> phi;      ///< Phi(t), Phi(0) = I
  std::vector<double> trace_integral;    ///< integral of tr dF, for Liouville checks
};

/// Fundamental matrix of the density process, d Phi/dt = dF(rho(t)) Phi.
FundamentalSolution solve_fundamental(const SegmentConfig& config,
                                      const FluidTrajectory& fluid,
                                      const CovarianceOptions& options = {});

/// Cross-time covariance Gamma(s, t) = V(s) Psi(t, s)^T for s <= t, with
/// Psi(t, s) = Phi(t) Phi(s)^{-1} applied through a linear solve. Requires a
/// stored fundamental-matrix grid and V at s.
Eigen::MatrixXd cross_cov(const GaussianApprox& approx, double s_h, double t_h);

/// RK4 for d M/dt = A(t) M on [t0, t1]; exposed for oracle tests against the
/// matrix exponential.
Eigen::MatrixXd integrate_linear_matrix_ode(
    const std::function<Eigen::MatrixXd(double)>& a_of_t, const Eigen::MatrixXd& m0,
    double t0, double t1, int steps);

/// Weak Jacobian of the linearized process at a density state: dF = L H dQ
/// for the density process, dh = dQ L H for the counting processes.
Eigen::SparseMatrix<double> linearized_drift(const SegmentConfig& config,
                                             ProcessKind kind,
                                             std::span<const double> rho);

}  // namespace sctm
