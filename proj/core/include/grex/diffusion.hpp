#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "grex/gnn.hpp"

namespace grex {

struct DiffusionConfig {
    double sigma_data = 0.5;
    double rho = 7.0;
    double sigma_min = 0.002;
    double sigma_max = 80.0;
    double p_mean = -1.2;
    double p_std = 1.2;
    double s_tmin = 0.05;
    double s_tmax = 50.0;
    double s_noise = 1.003;
    double s_churn = 40.0;
    int n_steps = 256;
    // Default input scaling is c_in(t) = 1/sqrt(sigma_data^2 + t^2), which
    // keeps the network input at unit variance; set true for the
    // unnormalized 1/(sigma_data^2 + t^2) form.
    bool literal_c_in = false;
};

struct Weightings {
    double c_in;
    double c_out;
    double c_skip;
    double c_self;
};

Weightings weightings(double t, const DiffusionConfig& cfg);

// N strictly decreasing values from sigma_max to sigma_min, plus an appended
// terminal 0 so the final Euler step lands at zero noise (N + 1 entries).
std::vector<double> time_schedule(const DiffusionConfig& cfg);

double gamma_schedule(const DiffusionConfig& cfg, double t_i);

// Binary {0,1} <-> {-1,+1}; cluster sizes {1,2} <-> {-1,+1}. Decoding
// thresholds at zero with ties going to the upper value.
Eigen::VectorXd encode_binary(const std::vector<int>& bits);
Eigen::VectorXd encode_cluster_sizes(const std::vector<int>& v);
std::vector<int> decode_binary(const Eigen::VectorXd& x);
std::vector<int> decode_cluster_sizes(const Eigen::VectorXd& x);

struct DenoiserHandle {
    const DenoiserSpec* spec = nullptr;
    ParamStore* store = nullptr;
};

// Everything that conditions one denoising instance: the expanded graph, the
// spectral eigenpairs of its base (nullptr means k = 0 random embeddings,
// presampled into rand_emb), the reduction fraction, and the target size.
struct InstanceCond {
    const ExpansionState* es = nullptr;
    const DirectedView* view = nullptr;
    const EigPairs* eig = nullptr;
    Eigen::MatrixXd rand_emb;  // base nodes x d_emb, used when eig == nullptr
    double rho_hat = 0.0;
    double target_n = 1.0;
};

using FeaturePair = std::pair<Eigen::VectorXd, Eigen::VectorXd>;  // (v, e)

// Preconditioned denoised estimate, no gradients:
// D(x_t, x_hat, t) = c_skip x_t + c_out F(c_in x_t, c_self x_hat, t).
FeaturePair denoiser_D(const DenoiserHandle& model, const InstanceCond& cond,
                       const Eigen::VectorXd& v_t, const Eigen::VectorXd& e_t,
                       const Eigen::VectorXd& v_hat, const Eigen::VectorXd& e_hat, double t,
                       const DiffusionConfig& cfg);

// Fixes every random draw of one loss evaluation (tests, finite differences).
// When self_cond is set, the provided v_hat/e_hat are used as the frozen
// self-conditioning estimate, mirroring the stopped gradient.
struct LossDraws {
    double t = 1.0;
    bool self_cond = false;
    Eigen::VectorXd eps_v;
    Eigen::VectorXd eps_e;
    Eigen::VectorXd v_hat;
    Eigen::VectorXd e_hat;
};

// One denoising-score-matching loss evaluation on encoded targets. Gradients
// are accumulated into the store scaled by grad_scale (0 skips backward).
// The self-conditioning estimate is computed without gradient flow.
double diffusion_loss(const DenoiserHandle& model, const InstanceCond& cond,
                      const std::vector<int>& v_target, const std::vector<int>& e_target,
                      const DiffusionConfig& cfg, Rng& rng, double grad_scale,
                      bool train_mode = true, const LossDraws* fixed = nullptr);

// Core stochastic Heun loop with a pluggable denoiser, for oracles and tests.
using DenoiseFn = std::function<FeaturePair(const Eigen::VectorXd& v_t, const Eigen::VectorXd& e_t,
                                            const Eigen::VectorXd& v_hat,
                                            const Eigen::VectorXd& e_hat, double t)>;
FeaturePair sde_sample_with(const DenoiseFn& denoise, int n, int m, const DiffusionConfig& cfg,
                            Rng& rng);

// Model-bound sampler over the conditioned instance.
FeaturePair sde_sample(const DenoiserHandle& model, const InstanceCond& cond,
                       const DiffusionConfig& cfg, Rng& rng);

// Spectral embeddings evaluated without gradients (sampling path).
Eigen::MatrixXd node_embeddings_plain(const DenoiserHandle& model, const InstanceCond& cond);

}  // namespace grex
