#include <benchmark/benchmark.h>

#include "wfmgf/master.hpp"

namespace {

using namespace wfmgf::master;

void BM_BuildWrightFisher(benchmark::State& state) {
  const int two_n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_rate_wf(two_n));
}
BENCHMARK(BM_BuildWrightFisher)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_BuildImplicitFloating(benchmark::State& state) {
  const int two_n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_rate_implicit(two_n, Arithmetic::floating));
}
BENCHMARK(BM_BuildImplicitFloating)->Arg(16)->Arg(32);

void BM_BuildImplicitExact(benchmark::State& state) {
  const int two_n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_rate_implicit(two_n, Arithmetic::exact));
}
BENCHMARK(BM_BuildImplicitExact)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_BuildImplicitK(benchmark::State& state) {
  const int two_n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_rate_implicit_k(2, two_n, Arithmetic::floating));
  }
}
BENCHMARK(BM_BuildImplicitK)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Exponential(benchmark::State& state) {
  const auto rates = build_rate_wf(static_cast<int>(state.range(0)));
  TransitionOptions options;
  options.self_check = false;
  for (auto _ : state) benchmark::DoNotOptimize(transition_matrix(rates, 10.0, options));
}
BENCHMARK(BM_Exponential)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_ExponentialChecked(benchmark::State& state) {
  const auto rates = build_rate_wf(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(transition_matrix(rates, 10.0));
}
BENCHMARK(BM_ExponentialChecked)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
