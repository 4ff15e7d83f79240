#include <benchmark/benchmark.h>

#include "grex/datagen.hpp"
#include "grex/gnn.hpp"

using namespace grex;

namespace {

Eigen::MatrixXd random_states(int rows, int cols, Rng& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

// sparse planar input: cost should grow with edges + triangles, not n^3
void local_ppgn_on_planar(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(1);
    Graph g = gen_planar(n, rng);
    DirectedView view = DirectedView::build(g);
    PpgnDims dims{32, 24};
    ParamStore store;
    local_ppgn_init(store, "l", dims, rng);
    Eigen::MatrixXd states = random_states(view.entries(), dims.d_hidden, rng);
    for (auto _ : state) {
        Tape tape;
        ParamBinder binder(tape, store);
        Var out = local_ppgn_layer(tape, binder, "l", dims, view, tape.input(states));
        benchmark::DoNotOptimize(tape.value(out).sum());
    }
    state.SetComplexityN(n);
}

void dense_ppgn(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(1);
    PpgnDims dims{32, 24};
    ParamStore store;
    local_ppgn_init(store, "l", dims, rng);
    Eigen::MatrixXd states = random_states(n * n, dims.d_hidden, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ppgn_layer_dense(store, "l", dims, states, n, true).sum());
    }
    state.SetComplexityN(n);
}

}  // namespace

BENCHMARK(local_ppgn_on_planar)->RangeMultiplier(2)->Range(32, 512)->Complexity();
BENCHMARK(dense_ppgn)->RangeMultiplier(2)->Range(8, 64)->Complexity();
