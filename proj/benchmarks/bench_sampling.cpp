#include <benchmark/benchmark.h>

#include "grex/pipeline.hpp"

using namespace grex;

namespace {

// untrained weights; measures the per-size cost of the full expansion loop
void deterministic_sampling(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    ModelConfig mc;
    mc.denoiser.d_hidden = 16;
    mc.denoiser.d_ppgn = 12;
    mc.denoiser.d_emb = 8;
    mc.denoiser.layers = 2;
    mc.denoiser.signnet.d_signnet = 8;
    mc.denoiser.signnet.gin_layers = 1;
    mc.spectral_k = 0;
    mc.diffusion.n_steps = 8;
    Rng init(3);
    TrainState model = init_train_state(mc, init);
    SampleConfig cfg;
    cfg.diffusion = mc.diffusion;
    cfg.spectral_k = 0;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        Rng rng(++seed);
        Graph g = sample_deterministic(model, n, cfg, rng);
        benchmark::DoNotOptimize(g.num_edges());
    }
    state.SetComplexityN(n);
}

}  // namespace

BENCHMARK(deterministic_sampling)->RangeMultiplier(2)->Range(16, 128)->Complexity()
    ->Unit(benchmark::kMillisecond);
