#include <benchmark/benchmark.h>

#include "blp/simulator.hpp"

using namespace blp;

namespace {

FiniteBirthParams model(double sigma2) {
  FiniteBirthParams p;
  p.motion.sigma2 = sigma2;
  p.motion.drift = -0.1;
  p.motion.jumps = {{0.8, PointMassJump{-0.5}}, {0.4, ExponentialJump{-1.0, 2.0}}};
  p.beta = 1.0;
  p.rho = OffspringLaw({{0.6, RankedPointMeasure{0.0, -1.0}}, {0.4, RankedPointMeasure{0.5, -0.5, -2.0}}});
  return p;
}

SimulationConfig config(double horizon) {
  SimulationConfig c;
  c.horizon = horizon;
  c.observation_times = {horizon};
  return c;
}

}  // namespace

static void BM_SimulateFinite(benchmark::State& state) {
  const auto p = model(static_cast<double>(state.range(1)) / 2);
  const auto cfg = config(static_cast<double>(state.range(0)));
  std::uint64_t seed = 0;
  std::size_t particles = 0;
  for (auto _ : state) {
    RandomStream rng(seed++);
    const auto f = simulate_finite(p, cfg, rng);
    particles += f.size();
    benchmark::DoNotOptimize(f);
  }
  state.counters["particles"] = benchmark::Counter(static_cast<double>(particles), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulateFinite)->ArgsProduct({{1, 2, 4}, {0, 1}});

static void BM_SimulateNested(benchmark::State& state) {
  CharacteristicTriple t;
  t.a = 0.1;
  t.lambda.components = {{1.0, RankedPointMeasure{0.0, -0.5}},
                         {0.5, RankedPointMeasure{-3.0}},
                         {0.4, RankedPointMeasure{0.0, -7.0}}};
  const auto cfg = config(2.0);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    RandomStream rng(seed++);
    benchmark::DoNotOptimize(simulate_nested(t, {1.0, 5.0, 10.0}, cfg, rng));
  }
}
BENCHMARK(BM_SimulateNested);

static void BM_Replicas(benchmark::State& state) {
  const auto p = model(0.5);
  const auto cfg = config(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_replicas(1000, 7, [&](RandomStream& rng, std::size_t) {
      return simulate_finite(p, cfg, rng).size();
    }, static_cast<unsigned>(state.range(0))));
  }
}
BENCHMARK(BM_Replicas)->Arg(1)->Arg(4);
