#pragma once

#include <functional>
#include <unordered_map>

#include "grex/coarsen.hpp"
#include "grex/diffusion.hpp"
#include "grex/expand.hpp"

namespace grex {

struct ModelConfig {
    DenoiserSpec denoiser;
    DiffusionConfig diffusion;
    CoarsenConfig coarsen;
    int spectral_k = 2;            // eigenpairs for node embeddings; 0 = random
    bool condition_on_rho = true;
    bool perturbed_expansion = false;
    int perturb_radius = 1;
    double perturb_prob = 0.1;
};

// One diffusion training instance: the expanded graph, its discrete targets,
// and all conditioning inputs.
struct TrainingExample {
    ExpansionState es;
    std::vector<int> v_target;  // cluster sizes over expanded nodes
    std::vector<int> e_target;  // edge selection over expanded edges
    double rho_hat = 0.0;
    int target_n = 1;
    bool has_eig = false;
    EigPairs eig;  // of the base graph, when spectral_k > 0
};

// Per-graph store of sampled coarsening sequences. Every level of a sequence
// is consumed exactly once before a new sequence is drawn for that graph.
class SequenceCache {
public:
    // Returns the sequence for graph `idx` and a level drawn without
    // replacement; resamples a fresh sequence when the cache is exhausted.
    std::pair<const CoarseningSequence*, int> draw(int idx, const Graph& g,
                                                   const CoarsenConfig& cfg, Rng& rng);
    std::size_t remaining(int idx) const;
    long long sequences_built(int idx) const;

private:
    struct Entry {
        CoarseningSequence seq;
        std::vector<int> unconsumed;
        long long built = 0;
    };
    std::unordered_map<int, Entry> entries_;
};

TrainingExample build_training_example(const Graph& g, int graph_idx, SequenceCache& cache,
                                       const ModelConfig& cfg, Rng& rng);

struct TrainConfig {
    long long steps = 1000;
    int batch_size = 8;
    AdamConfig adam;
    double ema_coeff = 0.99;
    // validation checkpointing; 0 disables and keeps the final EMA weights
    long long eval_interval = 0;
    int val_samples = 8;
    DiffusionConfig val_diffusion;              // usually fewer denoising steps
    std::function<bool(const Graph&)> validity; // per-dataset validity test
};

struct TrainState {
    ModelConfig model;
    ParamStore store;
    AdamState adam;
    long long step = 0;
    SequenceCache cache;

    DenoiserHandle handle() { return DenoiserHandle{&model.denoiser, &store}; }
};

TrainState init_train_state(const ModelConfig& cfg, Rng& rng);

struct TrainResult {
    std::vector<double> loss_history;  // one entry per step (batch mean)
    double best_validation = -1.0;     // fraction, when validation ran
};

// Alg-style training loop: sample a graph, draw a cached coarsening level,
// build the diffusion targets, take an Adam step, update the EMA shadow.
TrainResult train(TrainState& state, const std::vector<Graph>& train_set,
                  const std::vector<Graph>& val_set, const TrainConfig& cfg, Rng& rng);

// Node embeddings for the expansion of g by v: SignNet on the k smallest
// nonzero Laplacian eigenpairs (zero-padded) or, for k = 0, per-base-node
// standard normal draws; replicated across each cluster. Rejects
// disconnected input.
Eigen::MatrixXd embeddings(DenoiserHandle model, const Graph& g, const std::vector<int>& v,
                           int k, Rng& rng);

struct SampleConfig {
    DiffusionConfig diffusion;
    double rho_min = 0.1;
    double rho_max = 0.3;
    int max_iterations = 0;  // 0 = 10 * ceil(log2 N) + 10
    bool condition_on_rho = true;
    int spectral_k = 2;
};

// Smallest positive integer solving n_plus = ceil(rho * (n + n_plus)).
int deterministic_expansion_count(int n, double rho);

// Iterative expansion to exactly target_n nodes: the n_plus highest-scoring
// nodes expand at each step (binary cluster sizes, edge-contraction regime).
Graph sample_deterministic(TrainState& state, int target_n, const SampleConfig& cfg, Rng& rng);

// Fully stochastic variant; halts when the sampled cluster sizes are all
// ones or the target size is reached.
Graph sample_stochastic(TrainState& state, int target_n, const SampleConfig& cfg, Rng& rng);

}  // namespace grex
