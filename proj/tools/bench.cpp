// Timing comparison of the OpenMP kernels against their serial references:
// the replication harness and the covariance right-hand side.

#include <chrono>
#include <cstdio>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sctm/ctmc.hpp"
#include "sctm/kernels.hpp"
#include "sctm/presets.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void bench_replicate(int replications) {
  const sctm::Scenario scenario = sctm::preset_scenario("validation-l2");
  const sctm::SegmentConfig config = scenario.to_config();

  sctm::ReplicateOptions serial{.parallel = false};
  sctm::ReplicateOptions parallel{.parallel = true};

  auto t0 = std::chrono::steady_clock::now();
  const auto a = sctm::replicate(config, scenario.horizon_h(), scenario.snapshot_dt_h(),
                                 replications, 7, serial);
  const double t_serial = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto b = sctm::replicate(config, scenario.horizon_h(), scenario.snapshot_dt_h(),
                                 replications, 7, parallel);
  const double t_parallel = seconds_since(t0);

  bool identical = a.mean == b.mean && a.stddev == b.stddev;
  std::printf("replicate      R=%-5d serial %7.3f s   parallel %7.3f s   speedup %.2fx   %s\n",
              replications, t_serial, t_parallel, t_serial / t_parallel,
              identical ? "bit-identical" : "MISMATCH");
}

void bench_lyapunov(int dim, int iters) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::SparseMatrix<double> a(dim, dim);
  a.reserve(Eigen::VectorXi::Constant(dim, 5));
  for (int i = 0; i < dim; ++i) {
    for (int off = -2; off <= 2; ++off) {
      const int j = i + off;
      if (j >= 0 && j < dim) a.insert(i, j) = u(rng);
    }
  }
  a.makeCompressed();
  Eigen::MatrixXd v = Eigen::MatrixXd::NullaryExpr(dim, dim, [&]() { return u(rng); });
  v = (0.5 * (v + v.transpose())).eval();
  const Eigen::MatrixXd d = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::MatrixXd out1(dim, dim), out2(dim, dim);

  auto t0 = std::chrono::steady_clock::now();
  for (int it = 0; it < iters; ++it) sctm::lyapunov_rhs(a, v, d, out1, false);
  const double t_serial = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  for (int it = 0; it < iters; ++it) sctm::lyapunov_rhs(a, v, d, out2, true);
  const double t_parallel = seconds_since(t0);

  std::printf("lyapunov_rhs   n=%-5d serial %7.3f s   parallel %7.3f s   speedup %.2fx   %s\n",
              dim, t_serial, t_parallel, t_serial / t_parallel,
              out1 == out2 ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP\n");
#endif
  bench_replicate(400);
  bench_lyapunov(200, 400);
  bench_lyapunov(400, 100);
  return 0;
}
