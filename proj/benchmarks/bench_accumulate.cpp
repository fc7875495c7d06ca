#include <benchmark/benchmark.h>

#include "radaccum/accumulate.hpp"
#include "radaccum/synth.hpp"

namespace {

using namespace radaccum;

const std::pair<Sequence, synth::GroundTruth>& urban() {
  static const auto run = [] {
    synth::ScenarioConfig cfg = synth::builtin_scenario("cluttered-urban");
    cfg.duration = 1.5;
    return synth::simulate(cfg);
  }();
  return run;
}

void BM_Accumulate(benchmark::State& state) {
  const auto& [seq, truth] = urban();
  AccumulationConfig cfg;
  cfg.horizon = static_cast<int>(state.range(0));
  cfg.ego_method = EgoSource::GroundTruth;
  cfg.dynamic_method = static_cast<DynamicCorrection>(state.range(1));
  const std::size_t k = seq.frames.size() - 1;
  for (auto _ : state) benchmark::DoNotOptimize(accumulate(seq, k, cfg, truth.ego_motion));
}
BENCHMARK(BM_Accumulate)
    ->ArgsProduct({{1, 5, 10}, {0, 1, 2}})
    ->ArgNames({"K", "dyn"})
    ->Unit(benchmark::kMicrosecond);

void BM_Simulate(benchmark::State& state) {
  synth::ScenarioConfig cfg = synth::builtin_scenario("straight-15kmh");
  cfg.duration = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(synth::simulate(cfg));
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMillisecond);

}  // namespace
