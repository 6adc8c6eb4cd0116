#include <benchmark/benchmark.h>

#include "blp/simulator.hpp"

using namespace blp;

namespace {

GenealogyForest forest(double horizon) {
  FiniteBirthParams p;
  p.motion.drift = 0.2;
  p.motion.jumps = {{0.8, PointMassJump{-0.5}}};
  p.beta = 1.5;
  p.rho = OffspringLaw({{1.0, RankedPointMeasure{0.0, -0.25}}, {0.5, RankedPointMeasure{0.5, 0.0, -1.0}}});
  SimulationConfig cfg;
  cfg.horizon = horizon;
  cfg.observation_times = {horizon / 2, horizon};
  RandomStream rng(3);
  return simulate_finite(p, cfg, rng);
}

}  // namespace

static void BM_Snapshot(benchmark::State& state) {
  const auto f = forest(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(f.snapshot(f.horizon()));
  state.counters["records"] = static_cast<double>(f.size());
}
BENCHMARK(BM_Snapshot)->Arg(2)->Arg(4);

static void BM_Partition(benchmark::State& state) {
  const auto f = forest(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(f.partition(f.horizon() / 2, f.horizon()));
  state.counters["records"] = static_cast<double>(f.size());
}
BENCHMARK(BM_Partition)->Arg(2)->Arg(4);

static void BM_ExportImport(benchmark::State& state) {
  const auto f = forest(3.0);
  for (auto _ : state) benchmark::DoNotOptimize(GenealogyForest::import_text(f.export_text()));
}
BENCHMARK(BM_ExportImport);
