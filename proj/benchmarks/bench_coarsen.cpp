#include <benchmark/benchmark.h>

#include "grex/coarsen.hpp"
#include "grex/datagen.hpp"
#include "grex/expand.hpp"

using namespace grex;

namespace {

void coarsening_sequence(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng data_rng(7);
    Graph g = gen_planar(n, data_rng);
    CoarsenConfig cfg;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        Rng rng(++seed);
        CoarseningSequence seq = rnd_red_seq(g, cfg, rng);
        benchmark::DoNotOptimize(seq.levels.size());
    }
    state.SetComplexityN(n);
}

void invert_one_step(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(7);
    Graph g = gen_planar(n, rng);
    CoarsenConfig cfg;
    CoarseningSequence seq = rnd_red_seq(g, cfg, rng);
    for (auto _ : state) {
        InvertedStep inv = invert_step(seq.steps[0]);
        benchmark::DoNotOptimize(inv.e.size());
    }
}

}  // namespace

BENCHMARK(coarsening_sequence)->RangeMultiplier(2)->Range(32, 256)->Complexity();
BENCHMARK(invert_one_step)->RangeMultiplier(2)->Range(64, 512);
