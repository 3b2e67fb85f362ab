#include "sctm/traveltime.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sctm/normal.hpp"

namespace sctm {

namespace {

void validate_query(const SegmentConfig& config, const TravelTimeQuery& q) {
  const int d = config.cell_count();
  if (q.origin_cell < 1 || q.origin_cell > d) {
    throw std::invalid_argument("travel time: origin cell out of range");
  }
  if (q.offset < 0 || q.origin_cell + q.offset > d) {
    throw std::invalid_argument("travel time: destination cell out of range");
  }
  if (q.vehicle_class < 1 || q.vehicle_class > config.class_count()) {
    throw std::invalid_argument("travel time: vehicle class out of range");
  }
  if (q.grid_h.empty()) throw std::invalid_argument("travel time: empty grid");
  double prev = -1.0;
  for (double x : q.grid_h) {
    if (x < 0.0 || x <= prev) {
      throw std::invalid_argument("travel time: grid must be nonnegative and increasing");
    }
    prev = x;
  }
}

// Propagates psi' = dh(rho(tau)) psi jointly with the fluid state from the
// tag time, recording the departure-counter component at each grid point.
std::vector<double> propagate_cross_term(const SegmentConfig& config,
                                         const FluidTrajectory& fluid, int tag_idx,
                                         int last_idx, const Eigen::VectorXd& start,
                                         int comp, int substeps) {
  const double output_dt = fluid.time_h[1] - fluid.time_h[0];
  const double h_max = config.cfl_step_h() / std::max(1, substeps);
  const int per_output = static_cast<int>(std::ceil(output_dt / h_max - 1e-12));
  const double h = output_dt / std::max(1, per_output);

  std::vector<double> rho = fluid.rho[tag_idx];
  Eigen::VectorXd psi = start;
  std::vector<double> out;
  out.reserve(last_idx - tag_idx + 1);
  out.push_back(psi[comp]);

  std::vector<double> f1(rho.size()), f2(rho.size()), f3(rho.size()), f4(rho.size());
  std::vector<double> rtmp(rho.size());
  for (int idx = tag_idx; idx < last_idx; ++idx) {
    for (int sub = 0; sub < per_output; ++sub) {
      drift(config, rho, f1);
      const Eigen::VectorXd k1 = linearized_drift(config, ProcessKind::Counting, rho) * psi;
      for (std::size_t i = 0; i < rho.size(); ++i) rtmp[i] = rho[i] + 0.5 * h * f1[i];
      drift(config, rtmp, f2);
      const Eigen::VectorXd k2 =
          linearized_drift(config, ProcessKind::Counting, rtmp) * (psi + 0.5 * h * k1);
      for (std::size_t i = 0; i < rho.size(); ++i) rtmp[i] = rho[i] + 0.5 * h * f2[i];
      drift(config, rtmp, f3);
      const Eigen::VectorXd k3 =
          linearized_drift(config, ProcessKind::Counting, rtmp) * (psi + 0.5 * h * k2);
      for (std::size_t i = 0; i < rho.size(); ++i) rtmp[i] = rho[i] + h * f3[i];
      drift(config, rtmp, f4);
      const Eigen::VectorXd k4 =
          linearized_drift(config, ProcessKind::Counting, rtmp) * (psi + h * k3);
      for (std::size_t i = 0; i < rho.size(); ++i) {
        rho[i] += h / 6.0 * (f1[i] + 2.0 * f2[i] + 2.0 * f3[i] + f4[i]);
      }
      psi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    out.push_back(psi[comp]);
  }
  return out;
}

}  // namespace

TravelTimeDistribution travel_time_cdf(const SegmentConfig& config,
                                       const TravelTimeQuery& query,
                                       const FluidTrajectory& fluid,
                                       const GaussianApprox& approx_y, int substeps) {
  validate_query(config, query);
  if (approx_y.kind != ProcessKind::Counting) {
    throw std::invalid_argument("travel time: need a counting-process approximation");
  }
  const int j = query.vehicle_class;
  const int dep = config.boundary_index(query.origin_cell + query.offset, j);
  const int ent = config.boundary_index(query.origin_cell - 1, j);

  const int tag_idx = fluid.grid_index(query.tag_time_h);
  const int last_idx = fluid.grid_index(query.tag_time_h + query.grid_h.back());

  const Eigen::MatrixXd& v_tag = approx_y.v_at(query.tag_time_h);
  const double var_ent = v_tag(ent, ent);
  const double y_ent = fluid.y[tag_idx][ent];

  // Cross term cov(Y_dep(t+x), Y_ent(t)) = [Psi(t+x, t) V(t) e_ent]_dep.
  std::vector<double> cross;
  if (approx_y.has_phi()) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(approx_y.phi[tag_idx]);
    if (!lu.isInvertible()) {
      throw NumericalFault("travel time: singular fundamental matrix");
    }
    const Eigen::VectorXd w = lu.solve(v_tag.col(ent));
    cross.reserve(last_idx - tag_idx + 1);
    for (int idx = tag_idx; idx <= last_idx; ++idx) {
      cross.push_back(approx_y.phi[idx].row(dep).dot(w));
    }
  } else {
    cross = propagate_cross_term(config, fluid, tag_idx, last_idx, v_tag.col(ent), dep,
                                 substeps);
  }

  TravelTimeDistribution dist;
  dist.query = query;
  dist.grid_h = query.grid_h;
  dist.cdf.reserve(query.grid_h.size());

  double running_max = 0.0;
  for (double x : query.grid_h) {
    const int idx = fluid.grid_index(query.tag_time_h + x);
    const double mu_raw = fluid.y[idx][dep] - y_ent;
    const double mu = query.continuity_correction ? mu_raw + 0.5 : mu_raw;
    const double var =
        approx_y.diag_v[idx][dep] + var_ent - 2.0 * cross[idx - tag_idx];
    if (var < -1e-9) {
      throw NumericalFault("travel time: negative variance " + std::to_string(var) +
                           " in the counter difference");
    }
    const double sigma = std::sqrt(std::max(0.0, var));
    double f;
    if (sigma == 0.0) {
      f = (mu >= 0.0) ? 1.0 : 0.0;
    } else {
      f = std_normal_cdf(mu / sigma);
    }
    dist.max_range_excursion =
        std::max({dist.max_range_excursion, -f, f - 1.0, 0.0});
    const double clamped = std::clamp(f, 0.0, 1.0);
    dist.max_monotonicity_violation =
        std::max(dist.max_monotonicity_violation, running_max - clamped);
    running_max = std::max(running_max, clamped);
    dist.cdf.push_back(running_max);
  }
  return dist;
}

std::vector<double> travel_time_pdf(const TravelTimeDistribution& dist) {
  const std::size_t n = dist.grid_h.size();
  if (n < 3) {
    throw std::invalid_argument("travel time pdf: need at least 3 grid points");
  }
  std::vector<double> pdf(n);
  const auto& x = dist.grid_h;
  const auto& f = dist.cdf;
  pdf[0] = std::max(0.0, (f[1] - f[0]) / (x[1] - x[0]));
  for (std::size_t i = 1; i + 1 < n; ++i) {
    pdf[i] = std::max(0.0, (f[i + 1] - f[i - 1]) / (x[i + 1] - x[i - 1]));
  }
  pdf[n - 1] = std::max(0.0, (f[n - 1] - f[n - 2]) / (x[n - 1] - x[n - 2]));
  return pdf;
}

double TravelTimeDistribution::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("quantile: probability must lie in (0, 1)");
  }
  if (p < cdf.front()) {
    throw std::domain_error("quantile: level below the first grid value");
  }
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    if (cdf[i] >= p) return grid_h[i];
  }
  throw std::domain_error("quantile: level not reached on the grid");
}

}  // namespace sctm
