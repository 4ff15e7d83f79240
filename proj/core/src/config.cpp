#include "grex/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace grex {
namespace {

template <typename T>
void get_if(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

RunConfig config_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    RunConfig c;
    get_if(j, "dataset", c.dataset);
    get_if(j, "dataset_count", c.dataset_count);
    get_if(j, "min_nodes", c.min_nodes);
    get_if(j, "max_nodes", c.max_nodes);
    get_if(j, "seed", c.seed);
    get_if(j, "contraction_family", c.contraction_family);
    get_if(j, "preserved_eigs", c.preserved_eigs);
    get_if(j, "rho_min", c.rho_min);
    get_if(j, "rho_max", c.rho_max);
    get_if(j, "lambda", c.lambda);
    get_if(j, "d_hidden", c.d_hidden);
    get_if(j, "d_ppgn", c.d_ppgn);
    get_if(j, "d_emb", c.d_emb);
    get_if(j, "layers", c.layers);
    get_if(j, "spectral_k", c.spectral_k);
    get_if(j, "d_signnet", c.d_signnet);
    get_if(j, "signnet_layers", c.signnet_layers);
    get_if(j, "dropout", c.dropout);
    get_if(j, "condition_on_rho", c.condition_on_rho);
    get_if(j, "perturbed_expansion", c.perturbed_expansion);
    get_if(j, "perturb_radius", c.perturb_radius);
    get_if(j, "perturb_prob", c.perturb_prob);
    get_if(j, "sigma_data", c.diffusion.sigma_data);
    get_if(j, "sigma_min", c.diffusion.sigma_min);
    get_if(j, "sigma_max", c.diffusion.sigma_max);
    get_if(j, "diffusion_rho", c.diffusion.rho);
    get_if(j, "p_mean", c.diffusion.p_mean);
    get_if(j, "p_std", c.diffusion.p_std);
    get_if(j, "s_tmin", c.diffusion.s_tmin);
    get_if(j, "s_tmax", c.diffusion.s_tmax);
    get_if(j, "s_noise", c.diffusion.s_noise);
    get_if(j, "s_churn", c.diffusion.s_churn);
    get_if(j, "denoising_steps", c.diffusion.n_steps);
    get_if(j, "literal_c_in", c.diffusion.literal_c_in);
    get_if(j, "sample_steps", c.sample_steps);
    get_if(j, "train_steps", c.train_steps);
    get_if(j, "batch_size", c.batch_size);
    get_if(j, "lr", c.lr);
    get_if(j, "ema_coeff", c.ema_coeff);
    get_if(j, "eval_interval", c.eval_interval);
    get_if(j, "val_samples", c.val_samples);
    get_if(j, "threads", c.threads);
    return c;
}

std::string config_to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["dataset"] = c.dataset;
    j["dataset_count"] = c.dataset_count;
    j["min_nodes"] = c.min_nodes;
    j["max_nodes"] = c.max_nodes;
    j["seed"] = c.seed;
    j["contraction_family"] = c.contraction_family;
    j["preserved_eigs"] = c.preserved_eigs;
    j["rho_min"] = c.rho_min;
    j["rho_max"] = c.rho_max;
    j["lambda"] = c.lambda;
    j["d_hidden"] = c.d_hidden;
    j["d_ppgn"] = c.d_ppgn;
    j["d_emb"] = c.d_emb;
    j["layers"] = c.layers;
    j["spectral_k"] = c.spectral_k;
    j["d_signnet"] = c.d_signnet;
    j["signnet_layers"] = c.signnet_layers;
    j["dropout"] = c.dropout;
    j["condition_on_rho"] = c.condition_on_rho;
    j["perturbed_expansion"] = c.perturbed_expansion;
    j["perturb_radius"] = c.perturb_radius;
    j["perturb_prob"] = c.perturb_prob;
    j["sigma_data"] = c.diffusion.sigma_data;
    j["sigma_min"] = c.diffusion.sigma_min;
    j["sigma_max"] = c.diffusion.sigma_max;
    j["diffusion_rho"] = c.diffusion.rho;
    j["p_mean"] = c.diffusion.p_mean;
    j["p_std"] = c.diffusion.p_std;
    j["s_tmin"] = c.diffusion.s_tmin;
    j["s_tmax"] = c.diffusion.s_tmax;
    j["s_noise"] = c.diffusion.s_noise;
    j["s_churn"] = c.diffusion.s_churn;
    j["denoising_steps"] = c.diffusion.n_steps;
    j["literal_c_in"] = c.diffusion.literal_c_in;
    j["sample_steps"] = c.sample_steps;
    j["train_steps"] = c.train_steps;
    j["batch_size"] = c.batch_size;
    j["lr"] = c.lr;
    j["ema_coeff"] = c.ema_coeff;
    j["eval_interval"] = c.eval_interval;
    j["val_samples"] = c.val_samples;
    j["threads"] = c.threads;
    return j.dump(2) + "\n";
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config: " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return config_from_json(ss.str());
}

void save_config(const RunConfig& cfg, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write config: " + path.string());
    os << config_to_json(cfg);
}

ModelConfig to_model_config(const RunConfig& c) {
    ModelConfig m;
    m.denoiser.d_hidden = c.d_hidden;
    m.denoiser.d_ppgn = c.d_ppgn;
    m.denoiser.d_emb = c.d_emb;
    m.denoiser.layers = c.layers;
    m.denoiser.dropout = c.dropout;
    m.denoiser.signnet.k = c.spectral_k > 0 ? c.spectral_k : 1;
    m.denoiser.signnet.d_signnet = c.d_signnet;
    m.denoiser.signnet.gin_layers = c.signnet_layers;
    m.denoiser.signnet.d_emb = c.d_emb;
    m.denoiser.signnet.dropout = c.dropout;
    m.diffusion = c.diffusion;
    m.coarsen.family = c.contraction_family == "neighborhood" ? ContractionKind::Neighborhood
                                                              : ContractionKind::Edge;
    m.coarsen.preserved_eigs = c.preserved_eigs;
    m.coarsen.rho_min = c.rho_min;
    m.coarsen.rho_max = c.rho_max;
    m.coarsen.lambda = c.lambda;
    m.spectral_k = c.spectral_k;
    m.condition_on_rho = c.condition_on_rho;
    m.perturbed_expansion = c.perturbed_expansion;
    m.perturb_radius = c.perturb_radius;
    m.perturb_prob = c.perturb_prob;
    return m;
}

TrainConfig to_train_config(const RunConfig& c) {
    TrainConfig t;
    t.steps = c.train_steps;
    t.batch_size = c.batch_size;
    t.adam.lr = c.lr;
    t.ema_coeff = c.ema_coeff;
    t.eval_interval = c.eval_interval;
    t.val_samples = c.val_samples;
    t.val_diffusion = c.diffusion;
    if (c.sample_steps > 0) t.val_diffusion.n_steps = c.sample_steps;
    return t;
}

SampleConfig to_sample_config(const RunConfig& c) {
    SampleConfig s;
    s.diffusion = c.diffusion;
    if (c.sample_steps > 0) s.diffusion.n_steps = c.sample_steps;
    s.rho_min = c.rho_min;
    s.rho_max = c.rho_max;
    s.condition_on_rho = c.condition_on_rho;
    s.spectral_k = c.spectral_k;
    return s;
}

}  // namespace grex
