#include "hdboot/bootstrap.hpp"
#include "hdboot/dependence.hpp"
#include "hdboot/serial.hpp"

#include <benchmark/benchmark.h>

using namespace hdboot;

namespace {

BlockSums make_psi(Index n, Index d) {
  ModelSpec spec;
  spec.model = ModelId::M1;
  spec.n = n;
  spec.d = d;
  spec.seed = 7;
  return block_sums(simulate_model(spec), 8);
}

void BM_DrawsSerial(benchmark::State& state) {
  const BlockSums psi = make_psi(500, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(serial::bootstrap_draws(psi, 1000, 1).draws.data());
}

void BM_DrawsParallel(benchmark::State& state) {
  const BlockSums psi = make_psi(500, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_draws(psi, 1000, 1).draws.data());
}

void BM_CovSerial(benchmark::State& state) {
  const BlockSums psi = make_psi(2000, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(serial::conditional_covariance(psi).data());
}

void BM_CovParallel(benchmark::State& state) {
  const BlockSums psi = make_psi(2000, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(conditional_covariance(psi).data());
}

ModelSpec theta_spec() {
  ModelSpec spec;
  spec.model = ModelId::M2;
  spec.n = 200;
  spec.d = 5;
  spec.seed = 3;
  return spec;
}

void BM_ThetaSerial(benchmark::State& state) {
  const ModelSpec spec = theta_spec();
  for (auto _ : state) benchmark::DoNotOptimize(serial::estimate_theta(spec, 2, 2.0, 200, 1).max_over_coords);
}

void BM_ThetaParallel(benchmark::State& state) {
  const ModelSpec spec = theta_spec();
  for (auto _ : state) benchmark::DoNotOptimize(estimate_theta(spec, 2, 2.0, 200, 1).max_over_coords);
}

}  // namespace

BENCHMARK(BM_DrawsSerial)->Arg(5)->Arg(25)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DrawsParallel)->Arg(5)->Arg(25)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CovSerial)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CovParallel)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ThetaSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ThetaParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
