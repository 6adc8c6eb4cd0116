#include <benchmark/benchmark.h>

#include "blp/levy_measure.hpp"

using namespace blp;

namespace {

CharacteristicTriple finite_triple(int components) {
  CharacteristicTriple t;
  t.sigma2 = 0.3;
  t.a = 0.1;
  t.theta = Theta(0.5);
  for (int i = 0; i < components; ++i) {
    t.lambda.components.push_back({1.0 / (i + 1), RankedPointMeasure{-0.25 * i, -0.5 * i - 1.0}});
  }
  return t;
}

CharacteristicTriple cascade_triple() {
  CharacteristicTriple t;
  t.sigma2 = 0.3;
  t.a = 0.1;
  t.theta = Theta(0.5);
  t.lambda.cascades = {{1.0, 0.5, RankedPointMeasure{0.0, -1.0}}, {1.0, 0.5, RankedPointMeasure{-1.0}}};
  return t;
}

}  // namespace

static void BM_KappaFinite(benchmark::State& state) {
  const auto t = finite_triple(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kappa(t, {0.5, 1.0}));
}
BENCHMARK(BM_KappaFinite)->Range(1, 256);

static void BM_KappaCascade(benchmark::State& state) {
  const auto t = cascade_triple();
  for (auto _ : state) benchmark::DoNotOptimize(kappa(t, {0.5, 1.0}));
}
BENCHMARK(BM_KappaCascade);

static void BM_CheckAdmissible(benchmark::State& state) {
  const auto t = cascade_triple();
  for (auto _ : state) benchmark::DoNotOptimize(check_admissible(t));
}
BENCHMARK(BM_CheckAdmissible);

static void BM_Decompose(benchmark::State& state) {
  const auto t = finite_triple(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(decompose(t, 1000.0));
}
BENCHMARK(BM_Decompose)->Range(1, 256);
