#include <benchmark/benchmark.h>

#include <vector>

#include <Eigen/Dense>

#include "rdmd/estimators.hpp"
#include "rdmd/rng.hpp"
#include "rdmd/robust_stats.hpp"
#include "rdmd/snapshots.hpp"
#include "rdmd/systems.hpp"

namespace {

// Contaminated ring-network snapshots sized by the number of oscillators.
rdmd::SnapshotPair ring_pair(int oscillators, int steps) {
  const rdmd::BenchmarkSystem sys = rdmd::make_ring(oscillators);
  const rdmd::TimeSeries truth =
      rdmd::simulate(sys, sys.default_x0(), 0.01, steps);
  rdmd::ContaminationPlan plan;
  plan.windows.push_back({1.0, 1.1, 0.2});
  return rdmd::build_pair(rdmd::contaminate(truth, plan));
}

std::vector<double> normal_draws(std::size_t n) {
  rdmd::Rng rng(12345);
  std::vector<double> xs(n);
  for (double& v : xs) v = rng.normal();
  return xs;
}

void BM_scale_mad(benchmark::State& state) {
  const auto xs = normal_draws(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rdmd::mad(xs));
  }
}
BENCHMARK(BM_scale_mad)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_scale_pairwise(benchmark::State& state) {
  const auto xs = normal_draws(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rdmd::scale_s2(xs));
  }
}
BENCHMARK(BM_scale_pairwise)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_projection_statistics(benchmark::State& state) {
  const rdmd::SnapshotPair pair =
      ring_pair(static_cast<int>(state.range(0)), 500);
  const Eigen::MatrixXd stacked = rdmd::stack_transitions(pair.Y, pair.Yp);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rdmd::projection_statistics(stacked));
  }
}
BENCHMARK(BM_projection_statistics)->Arg(5)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_fit_least_squares(benchmark::State& state) {
  const rdmd::SnapshotPair pair =
      ring_pair(static_cast<int>(state.range(0)), 500);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rdmd::exact_dmd(pair));
  }
}
BENCHMARK(BM_fit_least_squares)->Arg(5)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_fit_norm_robust(benchmark::State& state) {
  const rdmd::SnapshotPair pair =
      ring_pair(static_cast<int>(state.range(0)), 500);
  const rdmd::OutlierReport rep = rdmd::detect_outliers(pair.Y, pair.Yp);
  const rdmd::HuberConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rdmd::nrdmd(pair, cfg, rep));
  }
}
BENCHMARK(BM_fit_norm_robust)->Arg(5)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_fit_row_robust(benchmark::State& state) {
  const rdmd::SnapshotPair pair =
      ring_pair(static_cast<int>(state.range(0)), 500);
  const rdmd::OutlierReport rep = rdmd::detect_outliers(pair.Y, pair.Yp);
  const rdmd::HuberConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rdmd::krdmd(pair, cfg, rep));
  }
}
BENCHMARK(BM_fit_row_robust)->Arg(5)->Arg(15)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
