#include <doctest.h>

#include <cmath>
#include <set>

#include "grex/datagen.hpp"
#include "grex/pipeline.hpp"
#include "grex/wl.hpp"
#include "support/oracles.hpp"

using namespace grex;

namespace {

ModelConfig tiny_model(int spectral_k = 1) {
    ModelConfig cfg;
    cfg.denoiser.d_hidden = 8;
    cfg.denoiser.d_ppgn = 6;
    cfg.denoiser.d_emb = 4;
    cfg.denoiser.layers = 2;
    cfg.denoiser.signnet.d_signnet = 4;
    cfg.denoiser.signnet.gin_layers = 1;
    cfg.spectral_k = spectral_k;
    cfg.diffusion.n_steps = 4;
    return cfg;
}

SampleConfig tiny_sample_cfg(const ModelConfig& m) {
    SampleConfig cfg;
    cfg.diffusion = m.diffusion;
    cfg.spectral_k = m.spectral_k;
    cfg.condition_on_rho = m.condition_on_rho;
    return cfg;
}

}  // namespace

TEST_CASE("embeddings follow the replication rule") {
    Rng rng(1);
    ModelConfig mc = tiny_model(0);
    TrainState state = init_train_state(mc, rng);
    Graph p3 = oracles::path_graph(3);

    // k = 0: random embeddings, but replicas inside a cluster identical
    Rng erng(5);
    Eigen::MatrixXd emb = embeddings(state.handle(), p3, {2, 1, 1}, 0, erng);
    REQUIRE(emb.rows() == 4);
    CHECK((emb.row(0) - emb.row(1)).norm() == 0.0);
    CHECK((emb.row(0) - emb.row(2)).norm() != 0.0);

    // spectral path on P3 with k = 1: deterministic, replicated
    ModelConfig mc1 = tiny_model(1);
    Rng rng2(2);
    TrainState state1 = init_train_state(mc1, rng2);
    Rng erng2(7);
    Eigen::MatrixXd se = embeddings(state1.handle(), p3, {2, 1, 1}, 1, erng2);
    REQUIRE(se.rows() == 4);
    CHECK((se.row(0) - se.row(1)).norm() == 0.0);

    // singleton with k = 2: padded zero eigenpairs, deterministic output
    ModelConfig mc2 = tiny_model(2);
    Rng rng3(3);
    TrainState state2 = init_train_state(mc2, rng3);
    Rng erng3(9);
    Eigen::MatrixXd single = embeddings(state2.handle(), Graph::singleton(), {1}, 2, erng3);
    Rng erng4(9);
    Eigen::MatrixXd again = embeddings(state2.handle(), Graph::singleton(), {1}, 2, erng4);
    CHECK((single - again).norm() == 0.0);

    CHECK_THROWS(embeddings(state.handle(), Graph(2, {}), {1, 1}, 0, erng));
}

TEST_CASE("training examples cover the boundary levels") {
    Rng rng(11);
    ModelConfig cfg = tiny_model(1);
    Graph g = oracles::random_connected_graph(9, 0.15, rng);
    SequenceCache cache;
    bool saw_last = false, saw_first = false;
    for (int trial = 0; trial < 60; ++trial) {
        TrainingExample ex = build_training_example(g, 0, cache, cfg, rng);
        CHECK(ex.target_n == 9);
        CHECK(static_cast<int>(ex.v_target.size()) == ex.es.expanded_nodes());
        CHECK(static_cast<int>(ex.e_target.size()) == ex.es.expanded_edges());
        long long next = 0;
        for (int s : ex.v_target) next += s;
        CHECK(ex.rho_hat ==
              doctest::Approx(1.0 - static_cast<double>(ex.es.expanded_nodes()) / next));
        if (ex.es.base.num_nodes() == 1 && ex.es.expanded_nodes() == 1) {
            // terminal level: no edge targets, v encodes the final contraction
            saw_last = true;
            CHECK(ex.e_target.empty());
        }
        if (ex.es.expanded_nodes() == 9) {
            // level 0: reconstruction of the original graph, no further growth
            saw_first = true;
            CHECK(ex.v_target == std::vector<int>(9, 1));
            CHECK(ex.rho_hat == 0.0);
            Graph rebuilt = refine(ex.es, ex.e_target);
            CHECK(is_isomorphic(rebuilt, g));
        }
    }
    CHECK(saw_last);
    CHECK(saw_first);
}

TEST_CASE("sequence cache consumes every level exactly once") {
    Rng rng(13);
    ModelConfig cfg = tiny_model(0);
    Graph g = oracles::random_connected_graph(12, 0.1, rng);
    SequenceCache cache;
    TrainingExample first = build_training_example(g, 0, cache, cfg, rng);
    (void)first;
    CHECK(cache.sequences_built(0) == 1);
    const std::size_t remaining = cache.remaining(0);
    // draw the rest of the cached sequence; no resampling happens meanwhile
    std::multiset<int> sizes;
    for (std::size_t i = 0; i < remaining; ++i) {
        build_training_example(g, 0, cache, cfg, rng);
        CHECK(cache.sequences_built(0) == 1);
    }
    CHECK(cache.remaining(0) == 0);
    build_training_example(g, 0, cache, cfg, rng);
    CHECK(cache.sequences_built(0) == 2);
}

TEST_CASE("deterministic expansion count solves the ceil fixed point") {
    CHECK(deterministic_expansion_count(10, 0.3) == 5);
    Rng rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_int(10000));
        const double rho = 0.1 + 0.2 * rng.uniform();
        const int got = deterministic_expansion_count(n, rho);
        CHECK(got == static_cast<int>(std::ceil(rho * (n + got))));
        // smallest such value: brute force from 1
        int brute = 1;
        while (brute != static_cast<int>(std::ceil(rho * (n + brute)))) ++brute;
        CHECK(got == brute);
    }
}

TEST_CASE("deterministic sampling hits the target size exactly, untrained") {
    Rng rng(19);
    ModelConfig mc = tiny_model(0);
    TrainState state = init_train_state(mc, rng);
    SampleConfig cfg = tiny_sample_cfg(mc);
    for (int target : {1, 2, 3, 7, 16, 33}) {
        for (int run = 0; run < 3; ++run) {
            Rng srng = Rng(100 + run).stream("sampler", target);
            Graph g = sample_deterministic(state, target, cfg, srng);
            CHECK(g.num_nodes() == target);
        }
    }
    CHECK_THROWS(sample_deterministic(state, 0, cfg, rng));
}

TEST_CASE("expansion iteration count respects the geometric bound") {
    // growth by at least rho_min/(1-rho_min) per accepted step
    Rng rng(23);
    ModelConfig mc = tiny_model(0);
    TrainState state = init_train_state(mc, rng);
    SampleConfig cfg = tiny_sample_cfg(mc);
    const int target = 64;
    const double eps = cfg.rho_min / (1.0 - cfg.rho_min);
    const int bound = static_cast<int>(std::ceil(std::log(target) / std::log1p(eps))) + 1;
    cfg.max_iterations = bound;
    Rng srng(29);
    Graph g = sample_deterministic(state, target, cfg, srng);
    CHECK(g.num_nodes() == target);
}

TEST_CASE("stochastic sampling halts and is deterministic per seed") {
    Rng rng(31);
    ModelConfig mc = tiny_model(0);
    TrainState state = init_train_state(mc, rng);
    SampleConfig cfg = tiny_sample_cfg(mc);
    cfg.max_iterations = 64;

    Rng r1(7), r2(7);
    Graph a = sample_stochastic(state, 12, cfg, r1);
    Graph b = sample_stochastic(state, 12, cfg, r2);
    CHECK(a == b);
    CHECK(a.num_nodes() <= 12 * 2);  // final expansion may overshoot at most 2x

    // a denoiser forced to all-ones v halts immediately with the singleton:
    // zeroed parameters make D(x) = c_skip x; from the prior the first
    // discretization of v is random, so instead check the guard fires or a
    // graph is produced without exceptions
    for (int seed = 0; seed < 4; ++seed) {
        Rng srng(seed);
        try {
            Graph g = sample_stochastic(state, 6, cfg, srng);
            CHECK(g.num_nodes() >= 1);
        } catch (const std::runtime_error&) {
            // guard exceeded is an accepted outcome for a degenerate model
        }
    }
}

TEST_CASE("training runs, is deterministic, and zero budget is the identity") {
    Rng rng(37);
    ModelConfig mc = tiny_model(1);
    std::vector<Graph> data;
    for (int i = 0; i < 3; ++i) data.push_back(oracles::random_connected_graph(6, 0.2, rng));

    TrainConfig tcfg;
    tcfg.steps = 0;
    tcfg.batch_size = 2;
    Rng init1 = Rng(5).stream("init");
    TrainState zero_state = init_train_state(mc, init1);
    ParamStore before;
    {
        Rng init2 = Rng(5).stream("init");
        TrainState copy = init_train_state(mc, init2);
        Rng t(1);
        train(copy, data, {}, tcfg, t);
        for (int i = 0; i < copy.store.size(); ++i)
            CHECK((copy.store.value(i) - zero_state.store.value(i)).norm() == 0.0);
    }

    tcfg.steps = 3;
    auto run_once = [&]() {
        Rng init = Rng(5).stream("init");
        TrainState state = init_train_state(mc, init);
        Rng t(1);
        TrainResult result = train(state, data, {}, tcfg, t);
        return std::pair(std::move(state), std::move(result));
    };
    auto [s1, r1] = run_once();
    auto [s2, r2] = run_once();
    CHECK(r1.loss_history == r2.loss_history);
    for (int i = 0; i < s1.store.size(); ++i)
        CHECK((s1.store.value(i) - s2.store.value(i)).norm() == 0.0);
    CHECK(s1.step == 3);
    for (double loss : r1.loss_history) CHECK(loss > 0.0);
    CHECK_THROWS(train(s1, {}, {}, tcfg, rng));
}

TEST_CASE("single-graph overfit: loss falls toward its floor") {
    // The preconditioned objective starts near-optimal through the skip path
    // and the targets keep irreducible entropy from the random coarsening
    // level, so the decrease is bounded; 1.5x is a stable margin (measured
    // ~1.9x at 2000 steps).
    Rng root(7);
    Rng data_rng = root.stream("dataset");
    Graph tree = gen_tree(8, data_rng);
    ModelConfig mc = tiny_model(2);
    mc.denoiser.d_hidden = 24;
    mc.denoiser.d_ppgn = 16;
    mc.denoiser.d_emb = 8;
    mc.diffusion.n_steps = 256;
    Rng init = root.stream("init");
    TrainState state = init_train_state(mc, init);
    TrainConfig tcfg;
    tcfg.steps = 2000;
    tcfg.batch_size = 4;
    tcfg.adam.lr = 1e-3;
    tcfg.ema_coeff = 0.9;
    Rng trng = root.stream("train");
    TrainResult res = train(state, {tree}, {}, tcfg, trng);
    auto avg = [&](long long a, long long b) {
        double s = 0.0;
        for (long long i = a; i < b; ++i) s += res.loss_history[i];
        return s / static_cast<double>(b - a);
    };
    const double first = avg(0, 100);
    const double last = avg(tcfg.steps - 100, tcfg.steps);
    CHECK(last * 1.5 < first);
}

TEST_CASE("training with validation checkpointing keeps the best snapshot") {
    Rng rng(41);
    ModelConfig mc = tiny_model(0);
    std::vector<Graph> data;
    for (int i = 0; i < 2; ++i) data.push_back(oracles::random_connected_graph(5, 0.0, rng));

    TrainConfig tcfg;
    tcfg.steps = 4;
    tcfg.batch_size = 1;
    tcfg.eval_interval = 2;
    tcfg.val_samples = 2;
    tcfg.val_diffusion = mc.diffusion;
    tcfg.validity = [](const Graph& g) { return g.num_nodes() > 0; };
    Rng init = Rng(5).stream("init");
    TrainState state = init_train_state(mc, init);
    Rng t(1);
    TrainResult result = train(state, data, data, tcfg, t);
    CHECK(result.best_validation == doctest::Approx(1.0));
}
