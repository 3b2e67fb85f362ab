#include <doctest.h>

#include <cmath>

#include "sctm/fluid.hpp"
#include "sctm/presets.hpp"
#include "support/helpers.hpp"

using namespace sctm;
using namespace sctm::test;

TEST_SUITE_BEGIN("fluid");

namespace {

SegmentConfig drain_config(double ell = 1.0, double nu = 900.0) {
  return SegmentConfig({ell, ell, ell}, make_daganzo(kValidationParams), {0.0}, {nu},
                       {70.0, 90.0, 40.0});
}

double total_mass(const SegmentConfig& c, const DensityState& rho) {
  double mass = 0.0;
  for (int i = 1; i <= c.cell_count(); ++i) {
    for (int j = 1; j <= c.class_count(); ++j) {
      mass += c.length_km(i) * rho[c.cell_index(i, j)];
    }
  }
  return mass;
}

}  // namespace

TEST_CASE("empty segment stays empty") {
  SegmentConfig c({1.0, 1.0}, make_daganzo(kValidationParams), {0.0}, {900.0},
                  {0.0, 0.0});
  const FluidTrajectory t = solve_fluid(c, 0.5, 0.05);
  for (const auto& rho : t.rho) {
    for (double v : rho) CHECK(v == 0.0);
  }
  for (const auto& y : t.y) {
    for (double v : y) CHECK(v == 0.0);
  }
}

TEST_CASE("closed system conserves mass to integrator tolerance") {
  const SegmentConfig c = drain_config(1.0, 0.0);
  const FluidTrajectory t = solve_fluid(c, 1.0, 0.05);
  const double m0 = total_mass(c, t.rho.front());
  for (const auto& rho : t.rho) {
    CHECK(total_mass(c, rho) == doctest::Approx(m0).epsilon(1e-9));
  }
}

TEST_CASE("mass balance against the boundary counts") {
  const SegmentConfig c = drain_config();
  const FluidTrajectory t = solve_fluid(c, 0.5, 0.01);
  const double m0 = total_mass(c, t.rho.front());
  const int d = c.cell_count();
  for (std::size_t k = 0; k < t.time_h.size(); ++k) {
    const double in = t.y[k][c.boundary_index(0, 1)];
    const double out = t.y[k][c.boundary_index(d, 1)];
    CHECK(total_mass(c, t.rho[k]) - m0 ==
          doctest::Approx(in - out).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("densities stay inside the state space and Y is nondecreasing") {
  const SegmentConfig c = drain_config();
  const FluidTrajectory t = solve_fluid(c, 1000.0 / 3600.0, 1.0 / 3600.0);
  std::vector<double> prev_y(t.y.front().size(), 0.0);
  for (std::size_t k = 0; k < t.time_h.size(); ++k) {
    for (double v : t.rho[k]) {
      CHECK(v >= -1e-9);
      CHECK(v <= kValidationParams.jam_density_veh_km + 1e-9);
    }
    for (std::size_t a = 0; a < t.y[k].size(); ++a) {
      CHECK(t.y[k][a] >= prev_y[a] - 1e-12);
      prev_y[a] = t.y[k][a];
    }
  }
}

TEST_CASE("joint integration keeps rho = L X0 + L H Y") {
  const SegmentConfig c = drain_config();
  const FluidTrajectory t = solve_fluid(c, 0.25, 0.01);
  const int m = c.class_count();
  for (std::size_t k = 0; k < t.time_h.size(); ++k) {
    for (int i = 1; i <= c.cell_count(); ++i) {
      for (int j = 1; j <= m; ++j) {
        const int flat = c.cell_index(i, j);
        const double via_y = c.initial_density()[flat] +
                             (t.y[k][c.boundary_index(i - 1, j)] -
                              t.y[k][c.boundary_index(i, j)]) *
                                 c.inv_length(i);
        CHECK(t.rho[k][flat] == doctest::Approx(via_y).epsilon(1e-10).scale(1.0));
      }
    }
  }
}

TEST_CASE("godunov step at a fixed point") {
  SegmentConfig c({1.0, 1.0}, make_daganzo(kValidationParams), {0.0}, {0.0},
                  {0.0, 0.0});
  const DensityState next = godunov_step(c, c.initial_density(), 0.005);
  for (double v : next) CHECK(v == 0.0);
}

TEST_CASE("godunov step equals one Euler step of the drift") {
  const SegmentConfig c = drain_config();
  const double dt = 0.002;
  const DensityState rho = c.initial_density();
  const DensityState stepped = godunov_step(c, rho, dt);
  const std::vector<double> f = drift(c, rho);
  for (std::size_t a = 0; a < rho.size(); ++a) {
    CHECK(stepped[a] == rho[a] + dt * f[a]);
  }
}

TEST_CASE("godunov step rejects a CFL violation") {
  const SegmentConfig c = drain_config();  // CFL bound = 1/100 h
  CHECK_THROWS_AS(godunov_step(c, c.initial_density(), 0.02), DomainError);
}

TEST_CASE("iterated godunov converges to the RK4 trajectory") {
  const SegmentConfig c = drain_config();
  const double horizon = 1000.0 / 3600.0;
  const double dt = 0.1 / 3600.0;  // 0.1 s steps
  DensityState rho = c.initial_density();
  const long long steps = std::llround(horizon / dt);
  for (long long s = 0; s < steps; ++s) rho = godunov_step(c, rho, dt);
  const FluidTrajectory t = solve_fluid(c, horizon, horizon / 10.0);
  double gap = 0.0;
  for (std::size_t a = 0; a < rho.size(); ++a) {
    gap = std::max(gap, std::abs(rho[a] - t.rho.back()[a]));
  }
  CHECK(gap <= 1.0);
}

TEST_CASE("halving the internal step barely moves the solution") {
  const SegmentConfig c = drain_config();
  // Sample away from kink crossings: short horizon inside a smooth stretch.
  const double horizon = 120.0 / 3600.0;
  FluidOptions coarse;  // default step
  FluidOptions fine{.substeps = coarse.substeps * 2};
  const FluidTrajectory a = solve_fluid(c, horizon, horizon, coarse);
  const FluidTrajectory b = solve_fluid(c, horizon, horizon, fine);
  for (std::size_t i = 0; i < a.rho.back().size(); ++i) {
    CHECK(a.rho.back()[i] ==
          doctest::Approx(b.rho.back()[i]).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("invalid arguments") {
  const SegmentConfig c = drain_config();
  CHECK_THROWS_AS(solve_fluid(c, -1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(solve_fluid(c, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("densities stay admissible on every bundled scenario") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const Scenario s = preset_scenario(name);
    const SegmentConfig c = s.to_config();
    // Coarser output grid than the presets' plotting grid; the internal step
    // honors the CFL bound either way.
    const double out_dt = std::max(s.snapshot_dt_h(), s.horizon_h() / 100.0);
    const FluidTrajectory t = solve_fluid(c, s.horizon_h(), out_dt);
    for (const auto& rho : t.rho) {
      REQUIRE(c.admissible(rho, 1e-9));
    }
  }
}

TEST_CASE("forward propagation reaches the published boundary counts") {
  // 100 cells of 600 m, platoon of 60 veh/km (20% trucks) in the first five.
  DensityState rho0(200, 0.0);
  for (int i = 0; i < 5; ++i) {
    rho0[2 * i] = 48.0;
    rho0[2 * i + 1] = 12.0;
  }
  SegmentConfig c(std::vector<double>(100, 0.6), make_chanut_buisson(kTwoClassParams),
                  {0.0, 0.0}, {8000.0, 4000.0}, rho0);
  const double horizon = 300.0 / 3600.0;
  const double dt = 2.0 / 3600.0;
  const FluidTrajectory t = solve_fluid(c, horizon, dt);
  const int k200 = t.grid_index(200.0 / 3600.0);
  // Counters at the entry of cell 10 at t = 200 s.
  const double cars = t.y[k200][c.boundary_index(9, 1)];
  const double trucks = t.y[k200][c.boundary_index(9, 2)];
  CHECK(cars >= 92.0);
  CHECK(cars <= 94.0);
  CHECK(trucks >= 16.0);
  CHECK(trucks <= 18.0);
}

TEST_SUITE_END();
