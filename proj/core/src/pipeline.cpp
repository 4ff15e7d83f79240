#include "grex/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "grex/wl.hpp"

namespace grex {

std::pair<const CoarseningSequence*, int> SequenceCache::draw(int idx, const Graph& g,
                                                              const CoarsenConfig& cfg,
                                                              Rng& rng) {
    Entry& entry = entries_[idx];
    if (entry.unconsumed.empty()) {
        entry.seq = rnd_red_seq(g, cfg, rng);
        entry.unconsumed.resize(entry.seq.levels.size());
        for (std::size_t i = 0; i < entry.unconsumed.size(); ++i)
            entry.unconsumed[i] = static_cast<int>(i);
        ++entry.built;
    }
    const std::size_t pick = rng.uniform_int(entry.unconsumed.size());
    const int level = entry.unconsumed[pick];
    entry.unconsumed.erase(entry.unconsumed.begin() + static_cast<long>(pick));
    return {&entry.seq, level};
}

std::size_t SequenceCache::remaining(int idx) const {
    auto it = entries_.find(idx);
    return it == entries_.end() ? 0 : it->second.unconsumed.size();
}

long long SequenceCache::sequences_built(int idx) const {
    auto it = entries_.find(idx);
    return it == entries_.end() ? 0 : it->second.built;
}

namespace {

// Expansion of the step's child plus targets, with optional perturbation.
// Cluster-major node order makes phi explicit: expanded node offset[p] + i
// corresponds to the i-th member of cluster p in the parent.
ExpansionState expand_step(const CoarseningStep& step, const std::vector<int>& v,
                           const ModelConfig& cfg, Rng& rng, std::vector<int>* e_target) {
    ExpansionState es =
        cfg.perturbed_expansion
            ? perturbed_expand(step.child, v, cfg.perturb_radius, cfg.perturb_prob, rng)
            : expand(step.child, v);
    std::vector<int> to_parent(es.expanded_nodes());
    for (std::size_t p = 0; p < step.partition.size(); ++p)
        for (std::size_t i = 0; i < step.partition[p].size(); ++i)
            to_parent[es.cluster_offset[p] + static_cast<int>(i)] = step.partition[p][i];
    e_target->resize(es.expanded_edges());
    for (int i = 0; i < es.expanded_edges(); ++i) {
        const Edge& e = es.expanded.edge(i);
        (*e_target)[i] = step.parent.has_edge(to_parent[e.u], to_parent[e.v]) ? 1 : 0;
    }
    return es;
}

std::vector<int> cluster_sizes(const Partition& p) {
    std::vector<int> v(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) v[i] = static_cast<int>(p[i].size());
    return v;
}

}  // namespace

TrainingExample build_training_example(const Graph& g, int graph_idx, SequenceCache& cache,
                                       const ModelConfig& cfg, Rng& rng) {
    auto [seq, level] = cache.draw(graph_idx, g, cfg.coarsen, rng);
    const int last = static_cast<int>(seq->levels.size()) - 1;

    TrainingExample ex;
    ex.target_n = seq->levels[0].num_nodes();

    std::vector<int> to_parent;  // expanded node -> node of G_l
    if (level == last) {
        // terminal level: the base is the singleton itself, no edge targets
        ex.es = expand(seq->levels[last], std::vector<int>{1});
        ex.e_target.clear();
        to_parent = {0};
    } else {
        const CoarseningStep& step = seq->steps[level];
        std::vector<int> v_base = cluster_sizes(step.partition);
        ex.es = expand_step(step, v_base, cfg, rng, &ex.e_target);
        to_parent.resize(ex.es.expanded_nodes());
        for (std::size_t p = 0; p < step.partition.size(); ++p)
            for (std::size_t i = 0; i < step.partition[p].size(); ++i)
                to_parent[ex.es.cluster_offset[p] + static_cast<int>(i)] = step.partition[p][i];
    }

    // node targets: the next expansion's cluster sizes, reindexed through phi
    ex.v_target.assign(ex.es.expanded_nodes(), 1);
    if (level > 0) {
        const std::vector<int> v_next = cluster_sizes(seq->steps[level - 1].partition);
        for (int x = 0; x < ex.es.expanded_nodes(); ++x) ex.v_target[x] = v_next[to_parent[x]];
    }
    long long next_size = 0;
    for (int s : ex.v_target) next_size += s;
    ex.rho_hat = 1.0 - static_cast<double>(ex.es.expanded_nodes()) /
                           static_cast<double>(next_size);

    if (cfg.spectral_k > 0) {
        ex.has_eig = true;
        ex.eig = smallest_nonzero_eigenpairs(ex.es.base, cfg.spectral_k);
    }
    return ex;
}

TrainState init_train_state(const ModelConfig& cfg, Rng& rng) {
    TrainState state;
    state.model = cfg;
    state.model.denoiser.signnet.k = cfg.spectral_k > 0 ? cfg.spectral_k : 1;
    state.model.denoiser.signnet.d_emb = cfg.denoiser.d_emb;
    Rng init_rng = rng.stream("param-init");
    denoiser_init(state.store, state.model.denoiser, init_rng);
    state.store.reset_ema();
    state.adam.ensure(state.store);
    return state;
}

namespace {

InstanceCond make_cond(const TrainingExample& ex, const DirectedView& view,
                       const ModelConfig& cfg, Rng& rng) {
    InstanceCond cond;
    cond.es = &ex.es;
    cond.view = &view;
    cond.rho_hat = cfg.condition_on_rho ? ex.rho_hat : 0.0;
    cond.target_n = ex.target_n;
    if (ex.has_eig) {
        cond.eig = &ex.eig;
    } else {
        const int n = ex.es.base.num_nodes();
        cond.rand_emb.resize(n, cfg.denoiser.d_emb);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < cfg.denoiser.d_emb; ++j) cond.rand_emb(i, j) = rng.normal();
    }
    return cond;
}

double validation_fraction(TrainState& state, const std::vector<Graph>& val_set,
                           const TrainConfig& cfg, Rng& rng) {
    if (val_set.empty() || cfg.val_samples <= 0) return 0.0;
    SampleConfig sample_cfg;
    sample_cfg.diffusion = cfg.val_diffusion;
    sample_cfg.condition_on_rho = state.model.condition_on_rho;
    sample_cfg.spectral_k = state.model.spectral_k;
    sample_cfg.rho_min = state.model.coarsen.rho_min;
    sample_cfg.rho_max = state.model.coarsen.rho_max;

    state.store.swap_in_ema();  // sample with the shadow weights
    std::vector<Graph> samples;
    for (int i = 0; i < cfg.val_samples; ++i) {
        const Graph& ref = val_set[rng.uniform_int(val_set.size())];
        Rng srng = rng.stream("val-sample", static_cast<std::uint64_t>(i));
        samples.push_back(sample_deterministic(state, ref.num_nodes(), sample_cfg, srng));
    }
    state.store.swap_in_ema();

    int good = 0;
    for (const Graph& g : samples)
        if (!cfg.validity || cfg.validity(g)) ++good;
    return static_cast<double>(good) / static_cast<double>(samples.size());
}

}  // namespace

TrainResult train(TrainState& state, const std::vector<Graph>& train_set,
                  const std::vector<Graph>& val_set, const TrainConfig& cfg, Rng& rng) {
    if (train_set.empty()) throw std::invalid_argument("train: empty training set");
    TrainResult result;
    std::vector<Eigen::MatrixXd> best_values, best_emas;
    for (long long step = 0; step < cfg.steps; ++step) {
        state.store.zero_grad();
        double batch_loss = 0.0;
        for (int b = 0; b < cfg.batch_size; ++b) {
            const int idx = static_cast<int>(rng.uniform_int(train_set.size()));
            TrainingExample ex =
                build_training_example(train_set[idx], idx, state.cache, state.model, rng);
            DirectedView view = DirectedView::build(ex.es.expanded);
            InstanceCond cond = make_cond(ex, view, state.model, rng);
            DenoiserHandle handle = state.handle();
            batch_loss += diffusion_loss(handle, cond, ex.v_target, ex.e_target,
                                         state.model.diffusion, rng,
                                         1.0 / static_cast<double>(cfg.batch_size));
        }
        state.adam.step(state.store, cfg.adam);
        ema_update(state.store, cfg.ema_coeff);
        ++state.step;
        result.loss_history.push_back(batch_loss / static_cast<double>(cfg.batch_size));

        if (cfg.eval_interval > 0 && (step + 1) % cfg.eval_interval == 0) {
            Rng vrng = rng.stream("validation", static_cast<std::uint64_t>(step));
            const double metric = validation_fraction(state, val_set, cfg, vrng);
            if (metric > result.best_validation) {
                result.best_validation = metric;
                best_values.clear();
                best_emas.clear();
                for (int i = 0; i < state.store.size(); ++i) {
                    best_values.push_back(state.store.value(i));
                    best_emas.push_back(state.store.ema(i));
                }
            }
        }
    }
    if (!best_values.empty()) {
        for (int i = 0; i < state.store.size(); ++i) {
            state.store.value(i) = best_values[i];
            state.store.ema(i) = best_emas[i];
        }
    }
    return result;
}

Eigen::MatrixXd embeddings(DenoiserHandle model, const Graph& g, const std::vector<int>& v,
                           int k, Rng& rng) {
    if (!is_connected(g))
        throw std::invalid_argument("embeddings: input graph must be connected");
    ExpansionState es = expand(g, v);
    InstanceCond cond;
    cond.es = &es;
    Eigen::MatrixXd base;
    if (k > 0) {
        EigPairs eig = smallest_nonzero_eigenpairs(g, k);
        cond.eig = &eig;
        base = node_embeddings_plain(model, cond);
    } else {
        base.resize(g.num_nodes(), model.spec->d_emb);
        for (int i = 0; i < base.rows(); ++i)
            for (int j = 0; j < base.cols(); ++j) base(i, j) = rng.normal();
    }
    Eigen::MatrixXd out(es.expanded_nodes(), base.cols());
    for (int x = 0; x < es.expanded_nodes(); ++x) out.row(x) = base.row(es.node_cluster[x]);
    return out;
}

int deterministic_expansion_count(int n, double rho) {
    int n_plus = 1;
    while (n_plus != static_cast<int>(std::ceil(rho * (n + n_plus)))) ++n_plus;
    return n_plus;
}

namespace {

int iteration_guard(int target_n, const SampleConfig& cfg) {
    if (cfg.max_iterations > 0) return cfg.max_iterations;
    const int log2n = target_n > 1 ? static_cast<int>(std::ceil(std::log2(target_n))) : 1;
    return 10 * log2n + 10;
}

InstanceCond sampling_cond(const ExpansionState& es, const DirectedView& view,
                           const EigPairs* eig, const Eigen::MatrixXd* rand_emb,
                           double rho_hat, int target_n) {
    InstanceCond cond;
    cond.es = &es;
    cond.view = &view;
    cond.eig = eig;
    if (rand_emb) cond.rand_emb = *rand_emb;
    cond.rho_hat = rho_hat;
    cond.target_n = target_n;
    return cond;
}

Eigen::MatrixXd draw_rand_emb(int n, int d_emb, Rng& rng) {
    Eigen::MatrixXd h(n, d_emb);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d_emb; ++j) h(i, j) = rng.normal();
    return h;
}

}  // namespace

Graph sample_deterministic(TrainState& state, int target_n, const SampleConfig& cfg, Rng& rng) {
    if (target_n < 1) throw std::invalid_argument("sample_deterministic: target size >= 1");
    Graph g = Graph::singleton();
    std::vector<int> v{2};
    DenoiserHandle model = state.handle();
    const int guard = iteration_guard(target_n, cfg);
    int iter = 0;
    while (g.num_nodes() < target_n) {
        if (++iter > guard)
            throw std::runtime_error("sample_deterministic: iteration guard exceeded (" +
                                     std::to_string(guard) + "); degenerate model output");
        int n = 0;
        for (int s : v) n += s;
        const double rho = rng.uniform(cfg.rho_min, cfg.rho_max);
        int n_plus = deterministic_expansion_count(n, rho);
        n_plus = std::min(n_plus, target_n - n);
        const double rho_hat = 1.0 - static_cast<double>(n) / static_cast<double>(n + n_plus);

        ExpansionState es = expand(g, v);
        DirectedView view = DirectedView::build(es.expanded);
        EigPairs eig;
        Eigen::MatrixXd rand_emb;
        if (cfg.spectral_k > 0)
            eig = smallest_nonzero_eigenpairs(g, cfg.spectral_k);
        else
            rand_emb = draw_rand_emb(g.num_nodes(), model.spec->d_emb, rng);
        InstanceCond cond =
            sampling_cond(es, view, cfg.spectral_k > 0 ? &eig : nullptr,
                          cfg.spectral_k > 0 ? nullptr : &rand_emb,
                          cfg.condition_on_rho ? rho_hat : 0.0, target_n);

        FeaturePair scores = sde_sample(model, cond, cfg.diffusion, rng);

        // select exactly n_plus nodes for expansion, highest score first,
        // node index breaking ties
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return scores.first[a] > scores.first[b];
        });
        std::vector<int> v_next(n, 1);
        for (int i = 0; i < n_plus; ++i) v_next[order[i]] = 2;

        const std::vector<int> e_sel = decode_binary(scores.second);
        g = refine(es, e_sel);
        v = std::move(v_next);
    }
    return g;
}

Graph sample_stochastic(TrainState& state, int target_n, const SampleConfig& cfg, Rng& rng) {
    if (target_n < 1) throw std::invalid_argument("sample_stochastic: target size >= 1");
    DenoiserHandle model = state.handle();
    const int guard = iteration_guard(target_n, cfg);

    auto predict = [&](const Graph& g, const std::vector<int>& v, double rho_hat) {
        ExpansionState es = expand(g, v);
        DirectedView view = DirectedView::build(es.expanded);
        EigPairs eig;
        Eigen::MatrixXd rand_emb;
        if (cfg.spectral_k > 0)
            eig = smallest_nonzero_eigenpairs(g, cfg.spectral_k);
        else
            rand_emb = draw_rand_emb(g.num_nodes(), model.spec->d_emb, rng);
        InstanceCond cond =
            sampling_cond(es, view, cfg.spectral_k > 0 ? &eig : nullptr,
                          cfg.spectral_k > 0 ? nullptr : &rand_emb,
                          cfg.condition_on_rho ? rho_hat : 0.0, target_n);
        FeaturePair out = sde_sample(model, cond, cfg.diffusion, rng);
        return std::tuple(std::move(es), std::move(out));
    };

    // initial cluster size prediction on the singleton (empty edge channel)
    Graph g = Graph::singleton();
    const double rho0 = cfg.condition_on_rho ? rng.uniform(cfg.rho_min, cfg.rho_max) : 0.0;
    auto [es0, out0] = predict(g, {1}, rho0);
    std::vector<int> v = decode_cluster_sizes(out0.first);

    int iter = 0;
    while (g.num_nodes() < target_n) {
        if (std::all_of(v.begin(), v.end(), [](int s) { return s == 1; })) break;
        if (++iter > guard)
            throw std::runtime_error("sample_stochastic: iteration guard exceeded (" +
                                     std::to_string(guard) + ")");
        const double rho = cfg.condition_on_rho ? rng.uniform(cfg.rho_min, cfg.rho_max) : 0.0;
        auto [es, out] = predict(g, v, rho);
        v = decode_cluster_sizes(out.first);
        g = refine(es, decode_binary(out.second));
    }
    return g;
}

}  // namespace grex
