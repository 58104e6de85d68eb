// Stencil generation and assembly: serial reference against the OpenMP path.

#include <benchmark/benchmark.h>

#include "hoif/assembly.hpp"

namespace {

const hoif::Problem& problem(int which) {
  static const hoif::Problem ex31(hoif::builtin("ex31"));
  static const hoif::Problem ex34(hoif::builtin("ex34"));
  return which == 31 ? ex31 : ex34;
}

void BM_AssembleSerial(benchmark::State& state) {
  const hoif::Problem& P = problem(static_cast<int>(state.range(0)));
  const int J = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(hoif::assemble(P, J, {false, 1}));
}

void BM_AssembleParallel(benchmark::State& state) {
  const hoif::Problem& P = problem(static_cast<int>(state.range(0)));
  const int J = static_cast<int>(state.range(1));
  const int threads = static_cast<int>(state.range(2));
  for (auto _ : state) benchmark::DoNotOptimize(hoif::assemble(P, J, {true, threads}));
}

void BM_Solve(benchmark::State& state) {
  const hoif::GlobalSystem sys = hoif::assemble(problem(static_cast<int>(state.range(0))),
                                                static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(hoif::solve(sys));
}

}  // namespace

BENCHMARK(BM_AssembleSerial)->Args({31, 6})->Args({34, 6})->Args({34, 7})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AssembleParallel)
    ->Args({31, 6, 2})
    ->Args({31, 6, 4})
    ->Args({34, 6, 2})
    ->Args({34, 6, 4})
    ->Args({34, 7, 4})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_Solve)->Args({31, 6})->Args({34, 7})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
