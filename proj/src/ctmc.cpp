#include "sctm/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sctm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k) {
  // Mix twice so neighboring replication indices share no obvious structure.
  return splitmix64(splitmix64(base + 0x632BE59BD9B4E019ULL * (k + 1)));
}

PathSimulator::PathSimulator(const SegmentConfig& config, std::uint64_t seed)
    : config_(config), rng_state_(splitmix64(seed ^ 0xA3C59AC2ULL)) {
  state_.vehicles = config.initial_counts();
  state_.crossings.assign(config.rate_dim(), 0);
  state_.time_h = 0.0;
  density_.resize(config.state_dim());
  const int m = config.class_count();
  for (int i = 1; i <= config.cell_count(); ++i)
    for (int j = 0; j < m; ++j) {
      const int k = (i - 1) * m + j;
      density_[k] = static_cast<double>(state_.vehicles[k]) * config.inv_length(i);
    }
  model_rates_.assign(config.rate_dim(), 0.0);
  rates_.assign(config.rate_dim(), 0.0);
  compensator_.assign(config.rate_dim(), 0.0);
  assemble_rates(config_, density_, model_rates_);
  rates_ = model_rates_;
  for (int b = 0; b <= config.cell_count(); ++b) apply_guard(b);
  total_rate_ = 0.0;
  for (double r : rates_) total_rate_ += r;
}

double PathSimulator::next_uniform() {
  // xorshift64* keeps the stream self-contained and platform-stable.
  std::uint64_t x = rng_state_;
  x ^= x >> 12;
  x ^= x << 25;
  x ^= x >> 27;
  rng_state_ = x;
  const std::uint64_t bits = (x * 0x2545F4914F6CDD1DULL) >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;  // uniform on (0,1]
}

void PathSimulator::apply_guard(int b) {
  const int m = config_.class_count();
  const int d = config_.cell_count();
  const int receiving = (b == d) ? -1 : b + 1;  // cell gaining a vehicle
  for (int j = 0; j < m; ++j) {
    double r = model_rates_[b * m + j];
    if (r > 0.0 && receiving > 0 &&
        !config_.cell_accepts(state_.vehicles, receiving, j + 1)) {
      r = 0.0;
    }
    rates_[b * m + j] = r;
  }
}

void PathSimulator::refresh_rates(int boundary) {
  local_rate_update(config_, density_, boundary, model_rates_);
  const int d = config_.cell_count();
  for (int b = std::max(0, boundary - 1); b <= std::min(d, boundary + 1); ++b) {
    apply_guard(b);
  }
  total_rate_ = 0.0;
  for (double r : rates_) total_rate_ += r;
}

bool PathSimulator::step(double t_limit_h) {
  if (state_.time_h >= t_limit_h) return false;
  if (total_rate_ <= 0.0) {
    state_.time_h = t_limit_h;
    return false;
  }
  const double wait = -std::log(next_uniform()) / total_rate_;
  const double t_event = state_.time_h + wait;
  const double dt = std::min(t_event, t_limit_h) - state_.time_h;
  for (int a = 0; a < config_.rate_dim(); ++a) compensator_[a] += rates_[a] * dt;
  if (t_event >= t_limit_h) {
    // Truncating the wait at a deterministic time keeps the law exact: the
    // residual clock is redrawn on the next call (memorylessness).
    state_.time_h = t_limit_h;
    return false;
  }
  state_.time_h = t_event;

  // Categorical draw proportional to the enabled rates.
  double target = next_uniform() * total_rate_;
  int idx = 0;
  const int last = config_.rate_dim() - 1;
  for (; idx < last; ++idx) {
    target -= rates_[idx];
    if (target <= 0.0) break;
  }
  if (rates_[idx] <= 0.0) {
    // Rounding in the cumulative walk can land on a disabled entry.
    int down = idx - 1;
    while (down >= 0 && rates_[down] <= 0.0) --down;
    if (down >= 0) {
      idx = down;
    } else {
      while (idx < last && rates_[idx] <= 0.0) ++idx;
    }
  }

  const int m = config_.class_count();
  const int d = config_.cell_count();
  const int b = idx / m;
  const int j = idx % m;
  if (b > 0) {
    const int k = (b - 1) * m + j;
    state_.vehicles[k] -= 1;
    density_[k] = static_cast<double>(state_.vehicles[k]) * config_.inv_length(b);
  }
  if (b < d) {
    const int k = b * m + j;
    state_.vehicles[k] += 1;
    density_[k] = static_cast<double>(state_.vehicles[k]) * config_.inv_length(b + 1);
  }
  state_.crossings[idx] += 1;
  last_boundary_ = b;
  last_class_ = j + 1;
  ++events_;
  refresh_rates(b);
  return true;
}

Trajectory simulate_path(const SegmentConfig& config, double horizon_h,
                         double snapshot_dt_h, std::uint64_t seed,
                         const SimulateOptions& options) {
  if (!(horizon_h > 0.0) || !(snapshot_dt_h > 0.0)) {
    throw std::invalid_argument("simulate_path: horizon and snapshot step must be positive");
  }
  const int snapshots = static_cast<int>(std::llround(horizon_h / snapshot_dt_h)) + 1;
  Trajectory traj;
  traj.seed = seed;
  traj.time_h.reserve(snapshots);
  traj.density.reserve(snapshots);
  traj.crossings.reserve(snapshots);

  PathSimulator sim(config, seed);
  for (int k = 0; k < snapshots; ++k) {
    const double t_snap = std::min(k * snapshot_dt_h, horizon_h);
    while (sim.step(t_snap)) {
    }
    traj.time_h.push_back(t_snap);
    traj.density.push_back(sim.density());
    traj.crossings.push_back(sim.state().crossings);
    if (options.record_compensator) traj.compensator.push_back(sim.compensator());
  }
  traj.event_count = sim.event_count();
  return traj;
}

namespace {

struct BlockAccumulator {
  std::vector<double> sum, sumsq, y_sum, y_sumsq;

  void init(std::size_t n, std::size_t ny) {
    sum.assign(n, 0.0);
    sumsq.assign(n, 0.0);
    y_sum.assign(ny, 0.0);
    y_sumsq.assign(ny, 0.0);
  }
  void add(const Trajectory& t, int dm, int rdim) {
    for (std::size_t k = 0; k < t.density.size(); ++k) {
      const auto& rho = t.density[k];
      for (int a = 0; a < dm; ++a) {
        const double v = rho[a];
        sum[k * dm + a] += v;
        sumsq[k * dm + a] += v * v;
      }
      const auto& y = t.crossings[k];
      for (int a = 0; a < rdim; ++a) {
        const double v = static_cast<double>(y[a]);
        y_sum[k * rdim + a] += v;
        y_sumsq[k * rdim + a] += v * v;
      }
    }
  }
  void merge(const BlockAccumulator& o) {
    for (std::size_t i = 0; i < sum.size(); ++i) {
      sum[i] += o.sum[i];
      sumsq[i] += o.sumsq[i];
    }
    for (std::size_t i = 0; i < y_sum.size(); ++i) {
      y_sum[i] += o.y_sum[i];
      y_sumsq[i] += o.y_sumsq[i];
    }
  }
};

}  // namespace

MomentEstimate replicate(const SegmentConfig& config, double horizon_h,
                         double snapshot_dt_h, int replications,
                         std::uint64_t base_seed, const ReplicateOptions& options) {
  if (replications < 2) {
    throw std::invalid_argument("replicate: need at least two replications");
  }
  const int dm = config.state_dim();
  const int rdim = config.rate_dim();
  const int snapshots = static_cast<int>(std::llround(horizon_h / snapshot_dt_h)) + 1;
  const std::size_t n = static_cast<std::size_t>(snapshots) * dm;
  const std::size_t ny = static_cast<std::size_t>(snapshots) * rdim;

  const int bs = std::max(1, options.block_size);
  const int blocks = (replications + bs - 1) / bs;
  std::vector<BlockAccumulator> acc(blocks);

  // Each block sums its replications in index order; blocks are then merged
  // in index order, so the estimate is invariant to the thread schedule.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (options.parallel)
#endif
  for (int blk = 0; blk < blocks; ++blk) {
    acc[blk].init(n, ny);
    const int lo = blk * bs;
    const int hi = std::min(replications, lo + bs);
    for (int r = lo; r < hi; ++r) {
      Trajectory t = simulate_path(config, horizon_h, snapshot_dt_h,
                                   derive_seed(base_seed, static_cast<std::uint64_t>(r)));
      acc[blk].add(t, dm, rdim);
    }
  }
  for (int blk = 1; blk < blocks; ++blk) acc[0].merge(acc[blk]);

  MomentEstimate est;
  est.replications = replications;
  est.base_seed = base_seed;
  est.time_h.resize(snapshots);
  for (int k = 0; k < snapshots; ++k) {
    est.time_h[k] = std::min(k * snapshot_dt_h, horizon_h);
  }
  est.mean.resize(n);
  est.stddev.resize(n);
  est.y_mean.resize(ny);
  est.y_stddev.resize(ny);
  const double r = static_cast<double>(replications);
  auto finish = [r](double s, double sq) {
    const double mean = s / r;
    const double var = std::max(0.0, (sq - r * mean * mean) / (r - 1.0));
    return std::pair{mean, std::sqrt(var)};
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto [mean, sd] = finish(acc[0].sum[i], acc[0].sumsq[i]);
    est.mean[i] = mean;
    est.stddev[i] = sd;
  }
  for (std::size_t i = 0; i < ny; ++i) {
    const auto [mean, sd] = finish(acc[0].y_sum[i], acc[0].y_sumsq[i]);
    est.y_mean[i] = mean;
    est.y_stddev[i] = sd;
  }
  return est;
}

}  // namespace sctm
