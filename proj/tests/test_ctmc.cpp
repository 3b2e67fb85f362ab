#include <doctest.h>

#include <numeric>
#include <set>

#include "sctm/ctmc.hpp"
#include "sctm/fluid.hpp"
#include "support/helpers.hpp"

using namespace sctm;
using namespace sctm::test;

TEST_SUITE_BEGIN("ctmc");

namespace {

SegmentConfig drain_config(double ell = 1.0, double nu = 900.0) {
  return SegmentConfig({ell, ell, ell}, make_daganzo(kValidationParams), {0.0}, {nu},
                       {70.0, 90.0, 40.0});
}

SegmentConfig cb_config() {
  return SegmentConfig({0.5, 0.5, 0.5, 0.5}, make_chanut_buisson(kTwoClassParams),
                       {1000.0, 200.0}, {4000.0, 1000.0},
                       {60.0, 12.0, 40.0, 8.0, 20.0, 4.0, 10.0, 2.0});
}

long long total_vehicles(const std::vector<long long>& x) {
  return std::accumulate(x.begin(), x.end(), 0LL);
}

}  // namespace

TEST_CASE("derived seeds are pairwise distinct") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t k = 0; k < 10000; ++k) seen.insert(derive_seed(42, k));
  CHECK(seen.size() == 10000);
}

TEST_CASE("empty closed system never moves") {
  SegmentConfig c({1.0, 1.0}, make_daganzo(kValidationParams), {0.0}, {0.0}, {0.0, 0.0});
  const Trajectory t = simulate_path(c, 1.0, 0.1, 7);
  CHECK(t.event_count == 0);
  for (const auto& rho : t.density) {
    for (double v : rho) CHECK(v == 0.0);
  }
  for (const auto& y : t.crossings) {
    for (long long v : y) CHECK(v == 0);
  }
}

TEST_CASE("closed system conserves the vehicle count along the whole path") {
  const SegmentConfig c = drain_config(1.0, 0.0);  // nu = 0: nothing leaves
  PathSimulator sim(c, 99);
  const long long total0 = total_vehicles(sim.state().vehicles);
  int events = 0;
  while (sim.step(10.0) && events < 20000) {
    CHECK(total_vehicles(sim.state().vehicles) == total0);
    ++events;
  }
  CHECK(events > 0);
}

TEST_CASE("path identity X(t) = X(0) + H Y(t) after every event") {
  const SegmentConfig c = cb_config();
  PathSimulator sim(c, 1234);
  const std::vector<long long> x0 = sim.state().vehicles;
  const int m = c.class_count();
  for (int ev = 0; ev < 5000; ++ev) {
    if (!sim.step(100.0)) break;
    const auto& x = sim.state().vehicles;
    const auto& y = sim.state().crossings;
    for (int i = 1; i <= c.cell_count(); ++i) {
      for (int j = 0; j < m; ++j) {
        const int k = (i - 1) * m + j;
        CHECK(x[k] == x0[k] + y[k] - y[k + m]);
      }
    }
  }
}

TEST_CASE("crossings are nondecreasing with unit jumps") {
  const SegmentConfig c = cb_config();
  PathSimulator sim(c, 77);
  std::vector<long long> prev = sim.state().crossings;
  for (int ev = 0; ev < 2000; ++ev) {
    if (!sim.step(100.0)) break;
    const auto& y = sim.state().crossings;
    long long jumped = 0;
    for (std::size_t a = 0; a < y.size(); ++a) {
      CHECK(y[a] >= prev[a]);
      jumped += y[a] - prev[a];
    }
    CHECK(jumped == 1);
    prev = y;
  }
}

TEST_CASE("same seed reproduces the trajectory bit for bit") {
  const SegmentConfig c = drain_config();
  const Trajectory a = simulate_path(c, 0.2, 0.01, 4242);
  const Trajectory b = simulate_path(c, 0.2, 0.01, 4242);
  CHECK(a.event_count == b.event_count);
  CHECK(a.density == b.density);
  CHECK(a.crossings == b.crossings);
  const Trajectory other = simulate_path(c, 0.2, 0.01, 4243);
  CHECK(a.density != other.density);
}

TEST_CASE("rates after each event match a full reassembly") {
  const SegmentConfig c = cb_config();
  PathSimulator sim(c, 31);
  for (int ev = 0; ev < 10000; ++ev) {
    if (!sim.step(100.0)) break;
    const RateVector full = assemble_rates(c, sim.density());
    const RateVector& local = sim.model_rates();
    for (int a = 0; a < c.rate_dim(); ++a) CHECK(local[a] == full[a]);
  }
}

TEST_CASE("a jump only changes rates at neighboring boundaries") {
  const SegmentConfig c = cb_config();
  PathSimulator sim(c, 8);
  RateVector before = sim.rates();
  for (int ev = 0; ev < 3000; ++ev) {
    if (!sim.step(100.0)) break;
    const int b = sim.last_boundary();
    const RateVector& after = sim.rates();
    for (int a = 0; a < c.rate_dim(); ++a) {
      const int boundary = a / c.class_count();
      if (boundary < b - 1 || boundary > b + 1) CHECK(after[a] == before[a]);
    }
    before = after;
  }
}

TEST_CASE("snapshots hold the pre-jump state") {
  const SegmentConfig c = drain_config();
  const Trajectory t = simulate_path(c, 0.5, 0.05, 12345);
  REQUIRE(t.density.size() == 11);
  CHECK(t.time_h.front() == 0.0);
  // initial snapshot equals the configured initial state
  for (std::size_t a = 0; a < t.density[0].size(); ++a) {
    CHECK(t.density[0][a] == c.initial_density()[a]);
  }
}

TEST_CASE("replicate needs two paths and distinct seeds") {
  const SegmentConfig c = drain_config();
  CHECK_THROWS_AS(replicate(c, 0.1, 0.05, 1, 1), std::invalid_argument);
}

TEST_CASE("degenerate scenario has zero variance") {
  SegmentConfig c({1.0, 1.0}, make_daganzo(kValidationParams), {0.0}, {0.0}, {0.0, 0.0});
  const MomentEstimate est = replicate(c, 0.5, 0.1, 8, 5);
  for (double v : est.mean) CHECK(v == 0.0);
  for (double v : est.stddev) CHECK(v == 0.0);
}

TEST_CASE("serial and parallel replication agree bit for bit") {
  const SegmentConfig c = drain_config();
  ReplicateOptions serial{.parallel = false, .block_size = 16};
  ReplicateOptions parallel{.parallel = true, .block_size = 16};
  const MomentEstimate a = replicate(c, 0.25, 0.05, 64, 2024, serial);
  const MomentEstimate b = replicate(c, 0.25, 0.05, 64, 2024, parallel);
  CHECK(a.mean == b.mean);
  CHECK(a.stddev == b.stddev);
  CHECK(a.y_mean == b.y_mean);
  CHECK(a.y_stddev == b.y_stddev);
}

TEST_CASE("compensated crossings center at zero (martingale check)") {
  const SegmentConfig c = drain_config();
  const double horizon = 0.05;
  const int reps = 400;
  const int rdim = c.rate_dim();
  std::vector<double> sum(rdim, 0.0), sumsq(rdim, 0.0);
  SimulateOptions opts{.record_compensator = true};
  for (int r = 0; r < reps; ++r) {
    const Trajectory t =
        simulate_path(c, horizon, horizon, derive_seed(999, r), opts);
    for (int a = 0; a < rdim; ++a) {
      const double mart = static_cast<double>(t.crossings.back()[a]) -
                          t.compensator.back()[a];
      sum[a] += mart;
      sumsq[a] += mart * mart;
    }
  }
  for (int a = 0; a < rdim; ++a) {
    const double mean = sum[a] / reps;
    const double var = (sumsq[a] - reps * mean * mean) / (reps - 1);
    const double se = std::sqrt(std::max(var, 1e-12) / reps);
    CHECK(std::abs(mean) <= 3.0 * se + 1e-9);
  }
}

TEST_CASE("simulated mean tracks the fluid solution on a long cell") {
  // Coarse version of the validation experiment. The jump process carries an
  // inherent positive bias for roughly a relaxation time after each kink
  // crossing (verified against the exact master equation on a single cell),
  // so agreement at Monte-Carlo precision holds away from those windows and
  // the absolute gap stays small everywhere.
  const SegmentConfig c = drain_config(10.0);
  const double horizon = 10000.0 / 3600.0;
  const double dt = 100.0 / 3600.0;
  const int reps = 200;
  const MomentEstimate est = replicate(c, horizon, dt, reps, 31337);
  const FluidTrajectory fl = solve_fluid(c, horizon, dt);
  const int dm = c.state_dim();
  int outside = 0;
  int total = 0;
  double worst_gap = 0.0;
  for (std::size_t k = 0; k < fl.time_h.size(); ++k) {
    for (int a = 0; a < dm; ++a) {
      const double se = est.stddev[k * dm + a] / std::sqrt(double(reps));
      const double gap = std::abs(est.mean[k * dm + a] - fl.rho[k][a]);
      if (gap > 3.0 * se + 1e-2) ++outside;
      worst_gap = std::max(worst_gap, gap);
      ++total;
    }
  }
  CHECK(outside <= total / 5);
  CHECK(worst_gap <= 1.0);
}

TEST_SUITE_END();
