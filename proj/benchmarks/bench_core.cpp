#include <benchmark/benchmark.h>

#include <vector>

#include "chl/complex_maps.hpp"
#include "chl/growth.hpp"
#include "chl/hull.hpp"

namespace {

void BM_SlitForward(benchmark::State& state) {
  const chl::SlitParams p{0.3, 10000};
  chl::ComplexPoint z(0.7, 1.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(z = chl::slit_forward(z, p));
    z = {0.7, 1.3};
  }
}
BENCHMARK(BM_SlitForward);

void BM_GrowthStep(benchmark::State& state) {
  chl::GrowthState growth(static_cast<std::uint64_t>(state.range(0)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(growth.step());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GrowthStep)->Arg(10000)->Arg(1000000);

void BM_ComposeForward(benchmark::State& state) {
  const chl::Trace trace =
      chl::run_growth({1000, static_cast<std::uint64_t>(state.range(0)), 3, 0, 1.0, false});
  chl::ComplexPoint z(0.1, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(chl::compose_forward(z, trace.attachments, trace.n));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ComposeForward)->Arg(1000)->Arg(10000);

void BM_Envelope(benchmark::State& state) {
  const chl::Trace trace = chl::run_growth({1000, 2000, 3, 0, 1.0, false});
  for (auto _ : state) {
    benchmark::DoNotOptimize(chl::envelope(trace.attachments, trace.n, 1e-5, 128));
  }
}
BENCHMARK(BM_Envelope);

}  // namespace

BENCHMARK_MAIN();
