#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "grex/pipeline.hpp"

namespace grex {

// Flat run configuration. Every field can be overridden per key from a JSON
// config file or a CLI flag; the effective merged config is written next to
// every command output.
struct RunConfig {
    // dataset
    std::string dataset = "tree";  // preset name, see dataset_preset()
    int dataset_count = 0;         // 0 keeps the preset count
    int min_nodes = 0;             // nonzero overrides the preset size range
    int max_nodes = 0;
    std::uint64_t seed = 0;

    // coarsening
    std::string contraction_family = "edge";  // edge | neighborhood
    int preserved_eigs = 8;
    double rho_min = 0.1;
    double rho_max = 0.3;
    double lambda = 0.3;

    // denoiser
    int d_hidden = 256;
    int d_ppgn = 128;
    int d_emb = 32;
    int layers = 10;
    int spectral_k = 2;
    int d_signnet = 128;
    int signnet_layers = 5;
    double dropout = 0.1;
    bool condition_on_rho = true;
    bool perturbed_expansion = false;
    int perturb_radius = 1;
    double perturb_prob = 0.1;

    // diffusion
    DiffusionConfig diffusion;
    int sample_steps = 0;  // nonzero overrides diffusion.n_steps when sampling

    // training
    long long train_steps = 10000;
    int batch_size = 32;
    double lr = 1e-4;
    double ema_coeff = 0.99;
    long long eval_interval = 0;
    int val_samples = 8;

    int threads = 1;
};

RunConfig config_from_json(const std::string& text);
std::string config_to_json(const RunConfig& cfg);
RunConfig load_config(const std::filesystem::path& path);
void save_config(const RunConfig& cfg, const std::filesystem::path& path);

ModelConfig to_model_config(const RunConfig& cfg);
TrainConfig to_train_config(const RunConfig& cfg);
SampleConfig to_sample_config(const RunConfig& cfg);

}  // namespace grex
