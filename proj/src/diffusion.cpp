#include "sctm/diffusion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "sctm/kernels.hpp"

namespace sctm {

namespace {

int uniform_grid_index(const std::vector<double>& grid, double t_h, const char* what) {
  if (grid.size() < 2) throw std::out_of_range(std::string(what) + ": too few grid points");
  const double dt = grid[1] - grid[0];
  const double pos = (t_h - grid.front()) / dt;
  const long long k = std::llround(pos);
  if (k < 0 || k >= static_cast<long long>(grid.size()) ||
      std::abs(pos - static_cast<double>(k)) > 1e-6) {
    throw std::out_of_range(std::string(what) + ": time " + std::to_string(t_h) +
                            " h is not a grid point");
  }
  return static_cast<int>(k);
}

Eigen::SparseMatrix<double> structure_LH(const SegmentConfig& config) {
  const int dm = config.state_dim();
  const int m = config.class_count();
  Eigen::SparseMatrix<double> lh(dm, config.rate_dim());
  lh.reserve(Eigen::VectorXi::Constant(config.rate_dim(), 2));
  for (int k = 0; k < dm; ++k) {
    const double inv = config.inv_length(k / m + 1);
    lh.insert(k, k) = inv;
    lh.insert(k, k + m) = -inv;
  }
  lh.makeCompressed();
  return lh;
}

double sparse_trace(const Eigen::SparseMatrix<double>& a) {
  double tr = 0.0;
  for (int k = 0; k < a.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) {
      if (it.row() == it.col()) tr += it.value();
    }
  }
  return tr;
}

// Diffusion term of the density process, (L H Sigma)(L H Sigma)^T: per class
// a symmetric tridiagonal coupling of neighboring cells.
void density_noise(const SegmentConfig& config, const RateVector& q,
                   Eigen::MatrixXd& d_noise) {
  const int m = config.class_count();
  const int d = config.cell_count();
  d_noise.setZero();
  for (int i = 1; i <= d; ++i) {
    const double inv = config.inv_length(i);
    for (int j = 0; j < m; ++j) {
      const int k = (i - 1) * m + j;
      d_noise(k, k) = (q[(i - 1) * m + j] + q[i * m + j]) * inv * inv;
      if (i < d) {
        const double c = -q[i * m + j] * inv * config.inv_length(i + 1);
        d_noise(k, k + m) = c;
        d_noise(k + m, k) = c;
      }
    }
  }
}

struct DiffusionSystem {
  const SegmentConfig& config;
  ProcessKind kind;
  Eigen::SparseMatrix<double> lh;
  int dim;
  bool parallel;

  DiffusionSystem(const SegmentConfig& c, ProcessKind k, bool par)
      : config(c),
        kind(k),
        lh(structure_LH(c)),
        dim(k == ProcessKind::Density ? c.state_dim() : c.rate_dim()),
        parallel(par) {}

  Eigen::SparseMatrix<double> jacobian(std::span<const double> rho) const {
    const Eigen::SparseMatrix<double> dq = rate_gradient(config, rho);
    if (kind == ProcessKind::Density) return lh * dq;
    return dq * lh;
  }

  void noise(const RateVector& q, Eigen::MatrixXd& d_noise) const {
    if (kind == ProcessKind::Density) {
      density_noise(config, q, d_noise);
    } else {
      d_noise.setZero();
      for (int a = 0; a < config.rate_dim(); ++a) d_noise(a, a) = q[a];
    }
  }
};

// One RK4 stage of the joint system (rho, V, Phi, trace integral).
struct StageDeriv {
  std::vector<double> drho;
  Eigen::MatrixXd dv;
  Eigen::MatrixXd dphi;
  double dtrace = 0.0;
};

struct JointState {
  std::vector<double> rho;
  Eigen::MatrixXd v;
  Eigen::MatrixXd phi;
  double trace = 0.0;
};

void eval_stage(const DiffusionSystem& sys, const JointState& s, bool with_v,
                bool with_phi, RateVector& q, Eigen::MatrixXd& d_noise,
                StageDeriv& out) {
  const Eigen::SparseMatrix<double> a = sys.jacobian(s.rho);
  assemble_rates(sys.config, s.rho, q);
  out.drho.resize(sys.config.state_dim());
  drift_from_rates(sys.config, q, out.drho);
  if (with_v) {
    sys.noise(q, d_noise);
    lyapunov_rhs(a, s.v, d_noise, out.dv, sys.parallel);
  }
  if (with_phi) {
    spmm(a, s.phi, out.dphi, sys.parallel);
    out.dtrace = sparse_trace(a);
  }
}

void axpy_state(const JointState& base, double c, const StageDeriv& k, bool with_v,
                bool with_phi, JointState& out) {
  const std::size_t n = base.rho.size();
  out.rho.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.rho[i] = base.rho[i] + c * k.drho[i];
  if (with_v) out.v = base.v + c * k.dv;
  if (with_phi) {
    out.phi = base.phi + c * k.dphi;
    out.trace = base.trace + c * k.dtrace;
  }
}

void rk4_joint(const DiffusionSystem& sys, JointState& s, double h, bool with_v,
               bool with_phi, RateVector& q, Eigen::MatrixXd& d_noise,
               std::array<StageDeriv, 4>& k, JointState& tmp) {
  eval_stage(sys, s, with_v, with_phi, q, d_noise, k[0]);
  axpy_state(s, 0.5 * h, k[0], with_v, with_phi, tmp);
  eval_stage(sys, tmp, with_v, with_phi, q, d_noise, k[1]);
  axpy_state(s, 0.5 * h, k[1], with_v, with_phi, tmp);
  eval_stage(sys, tmp, with_v, with_phi, q, d_noise, k[2]);
  axpy_state(s, h, k[2], with_v, with_phi, tmp);
  eval_stage(sys, tmp, with_v, with_phi, q, d_noise, k[3]);
  const double w = h / 6.0;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    s.rho[i] += w * (k[0].drho[i] + 2.0 * k[1].drho[i] + 2.0 * k[2].drho[i] + k[3].drho[i]);
  }
  if (with_v) {
    s.v += w * (k[0].dv + 2.0 * k[1].dv + 2.0 * k[2].dv + k[3].dv);
    s.v = 0.5 * (s.v + s.v.transpose()).eval();
  }
  if (with_phi) {
    s.phi += w * (k[0].dphi + 2.0 * k[1].dphi + 2.0 * k[2].dphi + k[3].dphi);
    s.trace += w * (k[0].dtrace + 2.0 * k[1].dtrace + 2.0 * k[2].dtrace + k[3].dtrace);
  }
}

GaussianApprox solve_covariance(const SegmentConfig& config, const FluidTrajectory& fluid,
                                ProcessKind kind, const CovarianceOptions& options) {
  if (fluid.time_h.size() < 2) {
    throw std::invalid_argument("solve_covariance: fluid trajectory too short");
  }
  const double output_dt = fluid.time_h[1] - fluid.time_h[0];
  const double h_max = config.cfl_step_h() / std::max(1, options.substeps);
  const int per_output = static_cast<int>(std::ceil(output_dt / h_max - 1e-12));
  const double h = output_dt / std::max(1, per_output);

  DiffusionSystem sys(config, kind, options.parallel);
  GaussianApprox approx;
  approx.kind = kind;
  approx.dim = sys.dim;
  approx.time_h = fluid.time_h;

  std::vector<int> checkpoint_idx;
  checkpoint_idx.reserve(options.checkpoint_times_h.size());
  for (double t : options.checkpoint_times_h) {
    checkpoint_idx.push_back(uniform_grid_index(fluid.time_h, t, "solve_covariance"));
  }

  JointState s;
  s.rho = fluid.rho.front();
  s.v = Eigen::MatrixXd::Zero(sys.dim, sys.dim);
  if (options.store_fundamental) {
    s.phi = Eigen::MatrixXd::Identity(sys.dim, sys.dim);
  }
  RateVector q(config.rate_dim());
  Eigen::MatrixXd d_noise(sys.dim, sys.dim);
  std::array<StageDeriv, 4> k;
  JointState tmp;

  const int points = static_cast<int>(fluid.time_h.size());
  approx.mean.reserve(points);
  approx.diag_v.reserve(points);
  if (options.store_full) approx.v.reserve(points);
  if (options.store_fundamental) {
    approx.phi.reserve(points);
    approx.trace_integral.reserve(points);
  }

  auto record = [&](int idx) {
    const auto& mean_src =
        (kind == ProcessKind::Density) ? fluid.rho[idx] : fluid.y[idx];
    approx.mean.push_back(
        Eigen::Map<const Eigen::VectorXd>(mean_src.data(), mean_src.size()));
    assemble_rates(config, s.rho, q);
    approx.rates_veh_h.push_back(
        Eigen::Map<const Eigen::VectorXd>(q.data(), q.size()));
    Eigen::VectorXd dv = s.v.diagonal();
    for (int a = 0; a < sys.dim; ++a) {
      if (dv[a] < -1e-9) {
        throw NumericalFault("solve_covariance: negative variance " +
                             std::to_string(dv[a]) + " at grid point " +
                             std::to_string(idx));
      }
    }
    approx.diag_v.push_back(std::move(dv));
    if (options.store_full) approx.v.push_back(s.v);
    if (options.store_fundamental) {
      approx.phi.push_back(s.phi);
      approx.trace_integral.push_back(s.trace);
    }
    if (std::find(checkpoint_idx.begin(), checkpoint_idx.end(), idx) !=
        checkpoint_idx.end()) {
      approx.v_checkpoints.emplace(idx, s.v);
    }
  };

  record(0);
  for (int idx = 1; idx < points; ++idx) {
    for (int sub = 0; sub < per_output; ++sub) {
      rk4_joint(sys, s, h, true, options.store_fundamental, q, d_noise, k, tmp);
    }
    record(idx);
  }
  return approx;
}

}  // namespace

int GaussianApprox::grid_index(double t_h) const {
  return uniform_grid_index(time_h, t_h, "gaussian approx");
}

const Eigen::MatrixXd& GaussianApprox::v_at(double t_h) const {
  const int idx = grid_index(t_h);
  if (has_full_v()) return v[idx];
  const auto it = v_checkpoints.find(idx);
  if (it == v_checkpoints.end()) {
    throw std::out_of_range("gaussian approx: no stored covariance at t=" +
                            std::to_string(t_h) + " h");
  }
  return it->second;
}

double GaussianApprox::std_at(double t_h, int flat) const {
  const int idx = grid_index(t_h);
  return std::sqrt(std::max(0.0, diag_v[idx][flat]));
}

GaussianApprox solve_covariance_rho(const SegmentConfig& config,
                                    const FluidTrajectory& fluid,
                                    const CovarianceOptions& options) {
  return solve_covariance(config, fluid, ProcessKind::Density, options);
}

GaussianApprox solve_covariance_y(const SegmentConfig& config,
                                  const FluidTrajectory& fluid,
                                  const CovarianceOptions& options) {
  return solve_covariance(config, fluid, ProcessKind::Counting, options);
}

FundamentalSolution solve_fundamental(const SegmentConfig& config,
                                      const FluidTrajectory& fluid,
                                      const CovarianceOptions& options) {
  if (fluid.time_h.size() < 2) {
    throw std::invalid_argument("solve_fundamental: fluid trajectory too short");
  }
  const double output_dt = fluid.time_h[1] - fluid.time_h[0];
  const double h_max = config.cfl_step_h() / std::max(1, options.substeps);
  const int per_output = static_cast<int>(std::ceil(output_dt / h_max - 1e-12));
  const double h = output_dt / std::max(1, per_output);

  DiffusionSystem sys(config, ProcessKind::Density, options.parallel);
  FundamentalSolution sol;
  sol.time_h = fluid.time_h;

  JointState s;
  s.rho = fluid.rho.front();
  s.phi = Eigen::MatrixXd::Identity(sys.dim, sys.dim);
  RateVector q(config.rate_dim());
  Eigen::MatrixXd d_noise;
  std::array<StageDeriv, 4> k;
  JointState tmp;

  sol.phi.push_back(s.phi);
  sol.trace_integral.push_back(0.0);
  for (std::size_t idx = 1; idx < fluid.time_h.size(); ++idx) {
    for (int sub = 0; sub < per_output; ++sub) {
      rk4_joint(sys, s, h, false, true, q, d_noise, k, tmp);
    }
    sol.phi.push_back(s.phi);
    sol.trace_integral.push_back(s.trace);
  }
  return sol;
}

Eigen::MatrixXd cross_cov(const GaussianApprox& approx, double s_h, double t_h) {
  if (s_h > t_h) throw std::invalid_argument("cross_cov: require s <= t");
  if (!approx.has_phi()) {
    throw std::invalid_argument("cross_cov: fundamental matrix grid not stored");
  }
  const int is = approx.grid_index(s_h);
  const int it = approx.grid_index(t_h);
  const Eigen::MatrixXd& vs = approx.v_at(s_h);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(approx.phi[is].transpose());
  if (!lu.isInvertible()) {
    throw NumericalFault("cross_cov: singular fundamental matrix");
  }
  // Psi(t,s)^T = Phi(s)^{-T} Phi(t)^T
  const Eigen::MatrixXd psi_t = lu.solve(approx.phi[it].transpose());
  return vs * psi_t;
}

Eigen::MatrixXd integrate_linear_matrix_ode(
    const std::function<Eigen::MatrixXd(double)>& a_of_t, const Eigen::MatrixXd& m0,
    double t0, double t1, int steps) {
  Eigen::MatrixXd m = m0;
  const double h = (t1 - t0) / steps;
  for (int s = 0; s < steps; ++s) {
    const double t = t0 + s * h;
    const Eigen::MatrixXd k1 = a_of_t(t) * m;
    const Eigen::MatrixXd k2 = a_of_t(t + 0.5 * h) * (m + 0.5 * h * k1);
    const Eigen::MatrixXd k3 = a_of_t(t + 0.5 * h) * (m + 0.5 * h * k2);
    const Eigen::MatrixXd k4 = a_of_t(t + h) * (m + h * k3);
    m += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return m;
}

Eigen::SparseMatrix<double> linearized_drift(const SegmentConfig& config,
                                             ProcessKind kind,
                                             std::span<const double> rho) {
  const Eigen::SparseMatrix<double> lh = structure_LH(config);
  const Eigen::SparseMatrix<double> dq = rate_gradient(config, rho);
  if (kind == ProcessKind::Density) return lh * dq;
  return dq * lh;
}

}  // namespace sctm
