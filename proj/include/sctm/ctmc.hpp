#pragma once

#include <cstdint>
#include <vector>

#include "sctm/model.hpp"

namespace sctm {

/// Deterministic seed stream: the k-th replication runs on derive_seed(base, k).
/// SplitMix64 over the affine index keeps the streams pairwise distinct.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k);
inline constexpr const char* kSeedScheme = "splitmix64";

/// Integer Markov state: vehicle counts per (cell, class), cumulative
/// boundary crossings per (boundary, class), current time.
struct CountState {
  std::vector<long long> vehicles;   ///< X, length d*m
  std::vector<long long> crossings;  ///< Y, length (d+1)*m, nondecreasing
  double time_h = 0.0;
};

/// One simulated path sampled on a fixed snapshot grid. Snapshots hold the
/// left-limit state at each grid time (the path is piecewise constant).
struct Trajectory {
  std::vector<double> time_h;
  std::vector<DensityState> density;               ///< per snapshot, d*m
  std::vector<std::vector<long long>> crossings;   ///< per snapshot, (d+1)*m
  std::vector<std::vector<double>> compensator;    ///< optional: integral of Q ds
  std::uint64_t seed = 0;
  std::uint64_t event_count = 0;
};

struct SimulateOptions {
  bool record_compensator = false;
};

/// Single-path stepper around the exponential-race (Gillespie) loop.
///
/// Each enabled transition carries the model rate from assemble_rates; a
/// transition whose jump would violate a receiving cell's integer cap or
/// occupancy constraint is disabled (rate treated as zero). After a jump at
/// boundary b, only the rates at boundaries b-1..b+1 are recomputed.
class PathSimulator {
 public:
  PathSimulator(const SegmentConfig& config, std::uint64_t seed);

  /// Advance by one event, but not past `t_limit_h`. Returns true if an
  /// event fired, false if the clock was advanced to t_limit_h (or no
  /// transition is enabled).
  bool step(double t_limit_h);

  const CountState& state() const { return state_; }
  const DensityState& density() const { return density_; }
  /// Effective (guard-masked) transition rates, veh/h.
  const RateVector& rates() const { return rates_; }
  /// Model rates without the integer-feasibility guard.
  const RateVector& model_rates() const { return model_rates_; }
  double total_rate() const { return total_rate_; }
  /// Boundary/class of the most recent event, -1 before any event.
  int last_boundary() const { return last_boundary_; }
  int last_class() const { return last_class_; }
  const std::vector<double>& compensator() const { return compensator_; }
  std::uint64_t event_count() const { return events_; }

 private:
  void refresh_rates(int boundary);
  void apply_guard(int boundary);
  double next_uniform();

  const SegmentConfig& config_;
  CountState state_;
  DensityState density_;
  RateVector model_rates_;
  RateVector rates_;
  std::vector<double> compensator_;
  double total_rate_ = 0.0;
  std::uint64_t rng_state_;
  std::uint64_t events_ = 0;
  int last_boundary_ = -1;
  int last_class_ = -1;
};

/// Exact CTMC path over [0, horizon], sampled every snapshot_dt.
Trajectory simulate_path(const SegmentConfig& config, double horizon_h,
                         double snapshot_dt_h, std::uint64_t seed,
                         const SimulateOptions& options = {});

/// Moment estimates over R independent replications.
struct MomentEstimate {
  std::vector<double> time_h;
  /// Sample mean/std of the density, snapshot-major: value(k, cell, class) at
  /// index k * dm + flat.
  std::vector<double> mean;
  std::vector<double> stddev;
  /// Same layout over boundaries for the counting processes.
  std::vector<double> y_mean;
  std::vector<double> y_stddev;
  int replications = 0;
  std::uint64_t base_seed = 0;

  double density_mean(int snapshot, int flat, int dm) const {
    return mean[static_cast<std::size_t>(snapshot) * dm + flat];
  }
  double density_std(int snapshot, int flat, int dm) const {
    return stddev[static_cast<std::size_t>(snapshot) * dm + flat];
  }
};

struct ReplicateOptions {
  bool parallel = true;   ///< OpenMP over replication blocks
  int block_size = 16;    ///< replications summed serially per block
};

/// Runs R paths on seeds derive_seed(base_seed, 0..R-1) and aggregates
/// unbiased moment estimates. Block-wise accumulation in fixed index order
/// makes the result identical for the serial and parallel variants.
MomentEstimate replicate(const SegmentConfig& config, double horizon_h,
                         double snapshot_dt_h, int replications,
                         std::uint64_t base_seed, const ReplicateOptions& options = {});

}  // namespace sctm
