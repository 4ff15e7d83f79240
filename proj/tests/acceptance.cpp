// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. An optional argv selects a subset, e.g. `acceptance 1 2 10`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "grex/config.hpp"
#include "grex/datagen.hpp"
#include "grex/eval.hpp"
#include "grex/pipeline.hpp"
#include "grex/wl.hpp"
#include "support/oracles.hpp"

using namespace grex;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Check {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

bool nearly(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string fmt(const char* pattern, double x, double y = 0.0, double z = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, x, y, z);
    return buf;
}

// ---------------------------------------------------------------- criterion 1
Outcome coarsening_invertibility() {
    Rng rng(2024);
    int good = 0;
    const int total = 200;
    for (int trial = 0; trial < total; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_int(47));
        Graph g = oracles::random_connected_graph(n, 0.12, rng);
        Partition part = oracles::random_edge_partition(g, rng);
        InvertedStep inv = invert_step(contract(g, part));
        Graph rebuilt = refine(inv.state, inv.e);
        if (rebuilt.num_nodes() == g.num_nodes() && is_isomorphic(rebuilt, g)) ++good;
    }
    return {good == total, fmt("%0.0f/200 reconstructions isomorphic", good)};
}

// ---------------------------------------------------------------- criterion 2
Outcome spectral_preservation() {
    Rng rng(17);
    CoarsenConfig cfg;  // k = 8, rho [0.1, 0.3], lambda 0.3, edge family
    int sequences = 0, violations = 0;
    double worst_slack = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        Graph g = trial % 2 == 0 ? gen_tree(64, rng) : gen_planar(64, rng);
        CoarseningSequence seq = rnd_red_seq(g, cfg, rng);
        ++sequences;
        EigPairs eig = smallest_nonzero_eigenpairs(g, 8);
        Eigen::MatrixXd lap = laplacian_dense(g);
        for (std::size_t level = 1; level < seq.levels.size(); ++level) {
            const double eps = spectral_error_bound(seq, static_cast<int>(level));
            auto [proj, lift] = composed_projection(seq, static_cast<int>(level));
            for (int i = 0; i < 8; ++i) {
                Eigen::VectorXd x = eig.vectors.col(i);
                if (x.norm() == 0.0) continue;
                Eigen::VectorXd diff = x - lift * (proj * x);
                const double lhs = std::sqrt(std::max(diff.dot(lap * diff), 0.0));
                const double rhs = eps * std::sqrt(std::max(x.dot(lap * x), 0.0));
                if (lhs > rhs + 1e-8) {
                    ++violations;
                    worst_slack = std::max(worst_slack, lhs - rhs);
                }
            }
        }
    }
    return {violations == 0,
            fmt("%0.0f sequences, %0.0f violations (worst slack %.2e)",
                static_cast<double>(sequences), static_cast<double>(violations), worst_slack)};
}

// ---------------------------------------------------------------- criterion 3
Outcome local_dense_equivalence() {
    Rng rng(31);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_int(7));
        const int h = 4 + static_cast<int>(rng.uniform_int(13));
        PpgnDims dims{h, std::max(2, h / 2)};
        ParamStore store;
        local_ppgn_init(store, "l", dims, rng);
        Graph g = oracles::complete_graph(n);
        DirectedView view = DirectedView::build(g);
        Eigen::MatrixXd states(view.entries(), h);
        for (int i = 0; i < states.rows(); ++i)
            for (int j = 0; j < h; ++j) states(i, j) = rng.normal();
        Eigen::MatrixXd dense(n * n, h);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) dense.row(i * n + j) = states.row(view.entry_of(g, i, j));
        Tape tape;
        ParamBinder binder(tape, store);
        Var local = local_ppgn_layer(tape, binder, "l", dims, view, tape.input(states));
        Eigen::MatrixXd dense_out = ppgn_layer_dense(store, "l", dims, dense, n, true);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                worst = std::max(worst, (tape.value(local).row(view.entry_of(g, i, j)) -
                                         dense_out.row(i * n + j))
                                            .cwiseAbs()
                                            .maxCoeff());
    }
    return {worst < 1e-10, fmt("max elementwise gap %.2e over 50 graphs", worst)};
}

// ---------------------------------------------------------------- criterion 4
Outcome gradient_fidelity() {
    Rng rng(47);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        DenoiserSpec spec;
        spec.d_hidden = 8;
        spec.d_ppgn = 6;
        spec.d_emb = 4;
        spec.layers = 2;
        spec.signnet.k = 1;
        spec.signnet.d_signnet = 4;
        spec.signnet.gin_layers = 1;
        spec.signnet.d_emb = 4;
        ParamStore store;
        denoiser_init(store, spec, rng);

        // base graph expanding to exactly six nodes
        Graph base = oracles::random_connected_graph(4, 0.4, rng);
        std::vector<int> v{2, 2, 1, 1};
        ExpansionState es = expand(base, v);
        DirectedView view = DirectedView::build(es.expanded);
        EigPairs eig = smallest_nonzero_eigenpairs(base, 1);

        std::vector<int> v_target(es.expanded_nodes()), e_target(es.expanded_edges());
        for (int& x : v_target) x = 1 + static_cast<int>(rng.uniform_int(2));
        for (int& x : e_target) x = static_cast<int>(rng.uniform_int(2));

        LossDraws draws;
        draws.t = std::exp(rng.normal(-1.2, 1.2));
        draws.t = std::clamp(draws.t, 0.05, 20.0);
        draws.self_cond = trial % 2 == 1;
        draws.eps_v.resize(es.expanded_nodes());
        draws.eps_e.resize(es.expanded_edges());
        for (int i = 0; i < draws.eps_v.size(); ++i) draws.eps_v[i] = rng.normal();
        for (int i = 0; i < draws.eps_e.size(); ++i) draws.eps_e[i] = rng.normal();
        if (draws.self_cond) {
            draws.v_hat = Eigen::VectorXd::Zero(es.expanded_nodes());
            draws.e_hat = Eigen::VectorXd::Zero(es.expanded_edges());
            for (int i = 0; i < draws.v_hat.size(); ++i) draws.v_hat[i] = rng.normal();
            for (int i = 0; i < draws.e_hat.size(); ++i) draws.e_hat[i] = rng.normal();
        }

        DenoiserHandle handle{&spec, &store};
        auto loss_fn = [&](double grad_scale) {
            InstanceCond cond;
            cond.es = &es;
            cond.view = &view;
            cond.eig = &eig;
            cond.rho_hat = 0.25;
            cond.target_n = 6;
            DiffusionConfig dcfg;
            Rng local(1);
            return diffusion_loss(handle, cond, v_target, e_target, dcfg, local, grad_scale,
                                  false, &draws);
        };
        auto result = oracles::finite_difference_check(store, loss_fn, 1e-5);
        worst = std::max(worst, result.max_rel_err);
    }
    return {worst < 1e-4, fmt("max relative gradient error %.3e over 20 instances", worst)};
}

// ---------------------------------------------------------------- criterion 5
Outcome diffusion_law() {
    DiffusionConfig cfg;
    Outcome out;

    std::vector<double> ts = time_schedule(cfg);
    if (ts[0] != 80.0 || ts[cfg.n_steps - 1] != 0.002) {
        out.pass = false;
        out.detail += "schedule endpoints off; ";
    }
    for (std::size_t i = 0; i + 1 < ts.size(); ++i)
        if (ts[i] <= ts[i + 1]) {
            out.pass = false;
            out.detail += "schedule not decreasing; ";
            break;
        }

    if (!nearly(gamma_schedule(cfg, 1.0), 0.15625, 0.0) || gamma_schedule(cfg, 80.0) != 0.0 ||
        gamma_schedule(cfg, 0.002) != 0.0) {
        out.pass = false;
        out.detail += "gamma formula off; ";
    }

    Rng rng(7);
    const double t = 1.7;
    const int draws = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double d = t * rng.normal();
        sum += d;
        sum_sq += d * d;
    }
    const double mean = sum / draws;
    const double var = sum_sq / draws - mean * mean;
    const double se_var = t * t * std::sqrt(2.0 / (draws - 1));
    if (std::abs(var - t * t) > 3.0 * se_var) {
        out.pass = false;
        out.detail += fmt("transition variance %.4f vs %.4f; ", var, t * t);
    }
    if (out.pass)
        out.detail = fmt("t0=80, tN-1=0.002, gamma(1)=0.15625, var err %.2e within 3 SE",
                         std::abs(var - t * t));
    return out;
}

ModelConfig untrained_model() {
    ModelConfig cfg;
    cfg.denoiser.d_hidden = 8;
    cfg.denoiser.d_ppgn = 6;
    cfg.denoiser.d_emb = 4;
    cfg.denoiser.layers = 2;
    cfg.denoiser.signnet.d_signnet = 4;
    cfg.denoiser.signnet.gin_layers = 1;
    cfg.spectral_k = 0;
    cfg.diffusion.n_steps = 4;
    return cfg;
}

// ---------------------------------------------------------------- criterion 6
Outcome size_contract() {
    ModelConfig mc = untrained_model();
    Rng init(3);
    TrainState state = init_train_state(mc, init);
    SampleConfig cfg;
    cfg.diffusion = mc.diffusion;
    cfg.spectral_k = 0;
    int bad = 0;
    long long runs = 0;
    for (int target : {1, 2, 7, 64, 256}) {
        for (int run = 0; run < 50; ++run) {
            Rng rng = Rng(1000 + run).stream("sampler", static_cast<std::uint64_t>(target));
            Graph g = sample_deterministic(state, target, cfg, rng);
            ++runs;
            if (g.num_nodes() != target) ++bad;
        }
    }
    return {bad == 0, fmt("%0.0f/%0.0f runs returned the exact size", static_cast<double>(runs - bad),
                          static_cast<double>(runs))};
}

struct TrainedTreeModel {
    TrainState state;
    SampleConfig sample_cfg;
    std::vector<int> train_sizes;
};

TrainedTreeModel train_tree_model() {
    // desk-scale recipe: 128 random trees with 8..16 nodes
    Rng root(990001);
    Rng data_rng = root.stream("dataset");
    DatasetSpec spec = dataset_preset("tree");
    spec.count = 128;
    spec.size_ranges = {{8, 16}};
    std::vector<Graph> trees = generate_dataset(spec, data_rng);

    ModelConfig mc;
    mc.denoiser.d_hidden = 40;
    mc.denoiser.d_ppgn = 28;
    mc.denoiser.d_emb = 12;
    mc.denoiser.layers = 3;
    mc.denoiser.signnet.d_signnet = 16;
    mc.denoiser.signnet.gin_layers = 2;
    mc.spectral_k = 2;
    mc.diffusion.n_steps = 48;

    Rng init = root.stream("model-init");
    TrainState state = init_train_state(mc, init);

    TrainConfig tcfg;
    tcfg.steps = 20000;
    tcfg.batch_size = 6;
    tcfg.adam.lr = 4e-4;
    tcfg.ema_coeff = 0.99;
    tcfg.eval_interval = 0;
    Rng train_rng = root.stream("diffusion-train");
    train(state, trees, {}, tcfg, train_rng);
    state.store.swap_in_ema();  // sample with the shadow weights

    TrainedTreeModel out{std::move(state), SampleConfig{}, {}};
    out.sample_cfg.diffusion = mc.diffusion;
    out.sample_cfg.spectral_k = mc.spectral_k;
    for (const Graph& t : trees) out.train_sizes.push_back(t.num_nodes());
    return out;
}

TrainedTreeModel* tree_model() {
    static TrainedTreeModel model = train_tree_model();
    return &model;
}

// ---------------------------------------------------------------- criterion 7
Outcome desk_scale_learning() {
    const auto start = std::chrono::steady_clock::now();
    TrainedTreeModel* model = tree_model();
    const double train_secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    Rng root(424242);
    std::vector<Graph> samples;
    int valid = 0;
    for (int i = 0; i < 100; ++i) {
        const int target =
            model->train_sizes[root.uniform_int(model->train_sizes.size())];
        Rng rng = root.stream("sampler", static_cast<std::uint64_t>(i));
        Graph g = sample_deterministic(model->state, target, model->sample_cfg, rng);
        if (is_valid_tree(g)) ++valid;
        samples.push_back(std::move(g));
    }
    VunReport report = vun(samples, {}, nullptr);
    const bool pass = valid >= 80 && report.unique_pct >= 90.0;
    return {pass, fmt("validity %0.0f%% (need >= 80), uniqueness %.1f%% (need >= 90); "
                      "training+setup %.0fs",
                      static_cast<double>(valid), report.unique_pct, train_secs)};
}

// ---------------------------------------------------------------- criterion 8
Outcome extrapolation_smoke() {
    TrainedTreeModel* model = tree_model();
    Rng root(515151);
    int valid = 0;
    for (int i = 0; i < 100; ++i) {
        Rng rng = root.stream("extrapolation", static_cast<std::uint64_t>(i));
        Graph g = sample_deterministic(model->state, 24, model->sample_cfg, rng);
        if (is_valid_tree(g)) ++valid;
    }
    return {valid >= 50, fmt("tree validity at n=24: %0.0f%% (need >= 50)",
                             static_cast<double>(valid))};
}

// ---------------------------------------------------------------- criterion 9
Outcome subquadratic_scaling() {
    Rng root(777);

    // iterative pipeline, one overfit model per size
    ModelConfig mc;
    mc.denoiser.d_hidden = 16;
    mc.denoiser.d_ppgn = 12;
    mc.denoiser.d_emb = 8;
    mc.denoiser.layers = 2;
    mc.denoiser.signnet.d_signnet = 8;
    mc.denoiser.signnet.gin_layers = 1;
    mc.spectral_k = 2;
    mc.diffusion.n_steps = 12;

    SampleConfig scfg;
    scfg.diffusion = mc.diffusion;
    scfg.spectral_k = mc.spectral_k;

    std::vector<ScalingPoint> points;
    for (int size : {64, 128, 256, 512, 1024}) {
        Rng data_rng = root.stream("bench-data", static_cast<std::uint64_t>(size));
        Graph target = gen_planar(size, data_rng);
        Rng init = root.stream("bench-init", static_cast<std::uint64_t>(size));
        TrainState state = init_train_state(mc, init);
        TrainConfig tcfg;
        tcfg.steps = 220;
        tcfg.batch_size = 2;
        tcfg.adam.lr = 1e-3;
        tcfg.ema_coeff = 0.95;
        Rng train_rng = root.stream("bench-train", static_cast<std::uint64_t>(size));
        train(state, {target}, {}, tcfg, train_rng);
        state.store.swap_in_ema();

        const int repeats = 3;
        double total = 0.0;
        long long edges = 0;
        for (int r = 0; r < repeats; ++r) {
            Rng rng = root.stream("bench-sample", static_cast<std::uint64_t>(size * 131 + r));
            const auto t0 = std::chrono::steady_clock::now();
            Graph g = sample_deterministic(state, size, scfg, rng);
            total += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            edges = g.num_edges();
        }
        points.push_back({size, total / repeats});
        std::printf("  [9] n=%d: %.2fs per graph, %lld edges\n", size, points.back().seconds,
                    edges);
        std::fflush(stdout);
    }
    const double slope = fitted_loglog_slope(points);

    // dense PPGN layer control
    Rng rng(11);
    PpgnDims dims{16, 12};
    ParamStore store;
    local_ppgn_init(store, "l", dims, rng);
    std::vector<ScalingPoint> control;
    for (int n : {16, 32, 64}) {
        Eigen::MatrixXd states(n * n, 16);
        for (int i = 0; i < states.rows(); ++i)
            for (int j = 0; j < 16; ++j) states(i, j) = rng.normal();
        const int repeats = 30;
        const auto t0 = std::chrono::steady_clock::now();
        for (int r = 0; r < repeats; ++r)
            ppgn_layer_dense(store, "l", dims, states, n, true);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / repeats;
        control.push_back({n, secs});
    }
    const double control_slope = fitted_loglog_slope(control);

    const bool pass = slope < 2.0 && control_slope >= 2.0;
    return {pass, fmt("pipeline slope %.2f (need < 2.0), dense-layer control slope %.2f "
                      "(need >= 2.0)",
                      slope, control_slope)};
}

// --------------------------------------------------------------- criterion 10
Outcome metric_sanity() {
    Outcome out;
    Rng rng(3);

    // mmd(X, X) = 0
    std::vector<Graph> set;
    for (int i = 0; i < 8; ++i) set.push_back(gen_tree(12, rng));
    for (GraphStatistic stat :
         {GraphStatistic::Degree, GraphStatistic::Clustering, GraphStatistic::Spectral}) {
        if (std::abs(mmd_statistic(set, set, stat)) > 1e-12) {
            out.pass = false;
            out.detail += "mmd(X,X) != 0; ";
        }
    }

    // exact planarity vs the exhaustive Kuratowski-minor oracle
    int checked = 0, mismatches = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 5 + static_cast<int>(rng.uniform_int(4));
        const double p = 0.2 + 0.6 * rng.uniform();
        Graph g = oracles::random_graph(n, p, rng);
        ++checked;
        if (is_planar(g) != oracles::planar_by_minor_search(g)) ++mismatches;
    }
    if (mismatches > 0) {
        out.pass = false;
        out.detail += fmt("%0.0f planarity mismatches; ", static_cast<double>(mismatches));
    }

    SplitIndices s = split(200, 0);
    if (s.train.size() != 128 || s.val.size() != 32 || s.test.size() != 40) {
        out.pass = false;
        out.detail += "split(200) != 128/32/40; ";
    }
    if (out.pass)
        out.detail = fmt("mmd identities hold, %0.0f planarity checks exact, split 128/32/40",
                         static_cast<double>(checked));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<Check> checks = {
        {1, "coarsening invertibility", coarsening_invertibility},
        {2, "spectral preservation", spectral_preservation},
        {3, "local/dense PPGN equivalence", local_dense_equivalence},
        {4, "gradient fidelity", gradient_fidelity},
        {5, "diffusion law checks", diffusion_law},
        {6, "deterministic size contract", size_contract},
        {7, "desk-scale learning", desk_scale_learning},
        {8, "extrapolation smoke", extrapolation_smoke},
        {9, "subquadratic scaling", subquadratic_scaling},
        {10, "metric sanity", metric_sanity},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const Check& check : checks) {
        if (!selected.empty() && !selected.count(check.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = check.run();
        } catch (const std::exception& err) {
            outcome.pass = false;
            outcome.detail = std::string("exception: ") + err.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %2d (%s): %s [%.1fs]\n", outcome.pass ? "PASS" : "FAIL",
                    check.id, check.name, outcome.detail.c_str(), secs);
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
