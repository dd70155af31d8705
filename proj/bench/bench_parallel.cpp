// Parallel kernels against their serial references.
#include <benchmark/benchmark.h>

#include "pencil/kernels.hpp"
#include "pencil/propagator.hpp"

namespace {

pencil::PencilProblem bench_problem() {
  using pencil::ScalarFunction;
  return pencil::PencilProblem(
      {ScalarFunction::cosine_series({0.0, 0.3}), ScalarFunction::cosine_series({0.0, -0.2})},
      {ScalarFunction::constant(0.2), ScalarFunction::cosine_series({0.0, 0.1}),
       ScalarFunction::polynomial({0.1, 0.05})},
      pencil::BoundaryMatrices::neumann(2));
}

void BM_ScanParallel(benchmark::State& state) {
  const auto problem = bench_problem();
  const pencil::Shooter shooter(problem, pencil::UniformGrid(2000));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pencil::characteristic_scan(shooter, -3.0, 3.0, state.range(0)));
  }
}

void BM_ScanSerial(benchmark::State& state) {
  const auto problem = bench_problem();
  const pencil::Shooter shooter(problem, pencil::UniformGrid(2000));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        pencil::characteristic_scan_serial(shooter, -3.0, 3.0, state.range(0)));
  }
}

void BM_GoursatParallel(benchmark::State& state) {
  const auto problem = bench_problem();
  const pencil::UniformGrid grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pencil::solve_goursat(problem, grid));
}

void BM_GoursatSerial(benchmark::State& state) {
  const auto problem = bench_problem();
  const pencil::UniformGrid grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pencil::solve_goursat_serial(problem, grid));
}

}  // namespace

BENCHMARK(BM_ScanParallel)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScanSerial)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GoursatParallel)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GoursatSerial)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
