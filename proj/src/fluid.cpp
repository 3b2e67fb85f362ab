#include "sctm/fluid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sctm {

int FluidTrajectory::grid_index(double t_h) const {
  if (time_h.size() < 2) throw std::out_of_range("fluid grid: too few points");
  const double dt = time_h[1] - time_h[0];
  const double pos = (t_h - time_h.front()) / dt;
  const long long k = std::llround(pos);
  if (k < 0 || k >= static_cast<long long>(time_h.size()) ||
      std::abs(pos - static_cast<double>(k)) > 1e-6) {
    throw std::out_of_range("fluid grid: time " + std::to_string(t_h) +
                            " h is not a grid point");
  }
  return static_cast<int>(k);
}

namespace {

// Joint state z = (rho, Y); dz/dt = (L H Q(rho), Q(rho)).
struct JointField {
  const SegmentConfig& config;
  mutable RateVector q;

  explicit JointField(const SegmentConfig& c) : config(c), q(c.rate_dim()) {}

  void operator()(const std::vector<double>& z, std::vector<double>& dz) const {
    const int dm = config.state_dim();
    assemble_rates(config, std::span<const double>(z.data(), dm), q);
    drift_from_rates(config, q, std::span<double>(dz.data(), dm));
    std::copy(q.begin(), q.end(), dz.begin() + dm);
  }
};

void rk4_step(const JointField& f, std::vector<double>& z, double h,
              std::vector<double>& k1, std::vector<double>& k2, std::vector<double>& k3,
              std::vector<double>& k4, std::vector<double>& tmp) {
  const std::size_t n = z.size();
  f(z, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + 0.5 * h * k1[i];
  f(tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + 0.5 * h * k2[i];
  f(tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + h * k3[i];
  f(tmp, k4);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

}  // namespace

FluidTrajectory solve_fluid_from(const SegmentConfig& config, const DensityState& rho0,
                                 double horizon_h, double output_dt_h,
                                 const FluidOptions& options) {
  if (!(horizon_h > 0.0) || !(output_dt_h > 0.0)) {
    throw std::invalid_argument("solve_fluid: horizon and output step must be positive");
  }
  const double cfl = config.cfl_step_h();
  if (!(cfl > 0.0) || !std::isfinite(cfl)) {
    throw DomainError("solve_fluid: degenerate CFL bound");
  }
  const double h_max = cfl / std::max(1, options.substeps);
  const int per_output = static_cast<int>(std::ceil(output_dt_h / h_max - 1e-12));
  const double h = output_dt_h / std::max(1, per_output);

  const int dm = config.state_dim();
  const int rdim = config.rate_dim();
  const int points = static_cast<int>(std::llround(horizon_h / output_dt_h)) + 1;

  FluidTrajectory out;
  out.internal_step_h = h;
  out.time_h.reserve(points);
  out.rho.reserve(points);
  out.y.reserve(points);

  JointField field(config);
  std::vector<double> z(dm + rdim, 0.0);
  std::copy(rho0.begin(), rho0.end(), z.begin());
  std::vector<double> k1(z.size()), k2(z.size()), k3(z.size()), k4(z.size()),
      tmp(z.size());

  auto record = [&](double t) {
    out.time_h.push_back(t);
    out.rho.emplace_back(z.begin(), z.begin() + dm);
    out.y.emplace_back(z.begin() + dm, z.end());
  };
  record(0.0);
  for (int k = 1; k < points; ++k) {
    for (int s = 0; s < per_output; ++s) rk4_step(field, z, h, k1, k2, k3, k4, tmp);
    record(k * output_dt_h);
  }
  return out;
}

FluidTrajectory solve_fluid(const SegmentConfig& config, double horizon_h,
                            double output_dt_h, const FluidOptions& options) {
  return solve_fluid_from(config, config.initial_density(), horizon_h, output_dt_h,
                          options);
}

DensityState godunov_step(const SegmentConfig& config, const DensityState& rho,
                          double dt_h) {
  if (dt_h > config.cfl_step_h() * (1.0 + 1e-12)) {
    throw DomainError("godunov_step: step " + std::to_string(dt_h) +
                      " h violates the CFL bound");
  }
  std::vector<double> f = drift(config, rho);
  DensityState next(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) next[i] = rho[i] + dt_h * f[i];
  return next;
}

}  // namespace sctm
