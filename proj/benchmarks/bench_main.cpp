#include <benchmark/benchmark.h>

#include <mam/rng.hpp>
#include <mam/sbf.hpp>
#include <mam/sim.hpp>

using namespace mam;

namespace {

Eigen::MatrixXd random_symmetric(int m, SplitMix64& rng) {
  Eigen::MatrixXd s(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = 2.0 * rng.uniform() - 1.0;
  return s;
}

void bench_riem_log(benchmark::State& state, Metric metric) {
  const int m = static_cast<int>(state.range(0));
  auto geo = make_geometry(metric);
  SplitMix64 rng(1);
  SpdMatrix p = sym_exp(random_symmetric(m, rng));
  SpdMatrix q = sym_exp(random_symmetric(m, rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(geo->riem_log(p, q));
  }
}

void bench_transport(benchmark::State& state, Metric metric) {
  const int m = static_cast<int>(state.range(0));
  auto geo = make_geometry(metric);
  SplitMix64 rng(2);
  SpdMatrix p = sym_exp(random_symmetric(m, rng));
  SpdMatrix q = sym_exp(random_symmetric(m, rng));
  TangentVector u(p, random_symmetric(m, rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(geo->transport(p, q, u));
  }
}

void bench_frechet_mean(benchmark::State& state, Metric metric) {
  auto geo = make_geometry(metric);
  SplitMix64 rng(3);
  std::vector<SpdMatrix> sample;
  for (int i = 0; i < state.range(0); ++i) {
    sample.push_back(sym_exp(random_symmetric(3, rng)));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(geo->frechet_mean(sample));
  }
}

void bench_densities(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SplitMix64 rng(4);
  Eigen::MatrixXd x(n, 3);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k) x(i, k) = rng.uniform();
  KernelSpec kernel{KernelFamily::Epanechnikov, {0.1, 0.1, 0.1}};
  GridSpec grid{101};
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_densities(x, kernel, grid));
  }
}

void bench_fit(benchmark::State& state, Metric metric) {
  SimConfig cfg;
  cfg.q = 3;
  cfg.n = static_cast<int>(state.range(0));
  cfg.m = 3;
  cfg.seed = 5;
  cfg.metric = metric;
  cfg.test_size = 10;
  auto geometry = std::shared_ptr<const Geometry>(make_geometry(metric));
  GeneratedData data = generate(cfg, 0.2, 1);
  const double h = std::min(0.5, 0.25 * std::pow(cfg.n, -0.2));
  KernelSpec kernel{KernelFamily::Epanechnikov, {h, h, h}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit(data.train, geometry, kernel, cfg.grid));
  }
}

}  // namespace

BENCHMARK_CAPTURE(bench_riem_log, log_cholesky, Metric::LogCholesky)->Arg(3)->Arg(10);
BENCHMARK_CAPTURE(bench_riem_log, log_euclidean, Metric::LogEuclidean)->Arg(3)->Arg(10);
BENCHMARK_CAPTURE(bench_transport, log_cholesky, Metric::LogCholesky)->Arg(3)->Arg(10);
BENCHMARK_CAPTURE(bench_transport, log_euclidean, Metric::LogEuclidean)->Arg(3)->Arg(10);
BENCHMARK_CAPTURE(bench_frechet_mean, log_cholesky, Metric::LogCholesky)->Arg(200);
BENCHMARK_CAPTURE(bench_frechet_mean, log_euclidean, Metric::LogEuclidean)->Arg(200);
BENCHMARK(bench_densities)->Arg(100)->Arg(400);
BENCHMARK_CAPTURE(bench_fit, log_cholesky, Metric::LogCholesky)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_fit, log_euclidean, Metric::LogEuclidean)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
