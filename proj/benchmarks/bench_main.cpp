#include <benchmark/benchmark.h>

#include <random>

#include "ordalia/ord.hpp"

using namespace ordalia;

static void BM_RealizeIndexed(benchmark::State& state) {
  std::mt19937 rng(1);
  const int nvars = (int)state.range(0);
  std::vector<std::vector<IdxAtom>> systems;
  for (int s = 0; s < 64; ++s) {
    std::vector<IdxAtom> atoms;
    for (int i = 0; i + 1 < nvars; ++i)
      atoms.push_back(rng() % 2 ? IdxAtom::lt((int)(rng() % nvars), (int)(rng() % nvars))
                                : IdxAtom::eq((int)(rng() % nvars), (int)(rng() % nvars)));
    systems.push_back(std::move(atoms));
  }
  RealizeScratch scratch;
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(scratch.satisfiable(nvars, systems[i & 63]));
    ++i;
  }
}
BENCHMARK(BM_RealizeIndexed)->Arg(6)->Arg(12)->Arg(24);

BENCHMARK_MAIN();
