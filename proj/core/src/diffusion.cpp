#include "grex/diffusion.hpp"

#include <cmath>
#include <stdexcept>

namespace grex {

Weightings weightings(double t, const DiffusionConfig& cfg) {
    if (!(t > 0.0)) throw std::invalid_argument("weightings: t must be positive");
    const double sd2 = cfg.sigma_data * cfg.sigma_data;
    const double denom = sd2 + t * t;
    Weightings w;
    w.c_skip = sd2 / denom;
    w.c_out = t * cfg.sigma_data / std::sqrt(denom);
    w.c_in = cfg.literal_c_in ? 1.0 / denom : 1.0 / std::sqrt(denom);
    w.c_self = cfg.sigma_data;
    return w;
}

std::vector<double> time_schedule(const DiffusionConfig& cfg) {
    if (cfg.n_steps < 2) throw std::invalid_argument("time_schedule: need N >= 2");
    const int n = cfg.n_steps;
    std::vector<double> t(n + 1);
    const double hi = std::pow(cfg.sigma_max, 1.0 / cfg.rho);
    const double lo = std::pow(cfg.sigma_min, 1.0 / cfg.rho);
    for (int i = 0; i < n; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(n - 1);
        t[i] = std::pow(hi + frac * (lo - hi), cfg.rho);
    }
    // the formula collapses to the exact endpoints at i = 0 and i = N-1
    t[0] = cfg.sigma_max;
    t[n - 1] = cfg.sigma_min;
    t[n] = 0.0;
    return t;
}

double gamma_schedule(const DiffusionConfig& cfg, double t_i) {
    if (t_i < cfg.s_tmin || t_i > cfg.s_tmax) return 0.0;
    return std::min(cfg.s_churn / static_cast<double>(cfg.n_steps), std::sqrt(2.0) - 1.0);
}

Eigen::VectorXd encode_binary(const std::vector<int>& bits) {
    Eigen::VectorXd out(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) out[i] = bits[i] ? 1.0 : -1.0;
    return out;
}

Eigen::VectorXd encode_cluster_sizes(const std::vector<int>& v) {
    Eigen::VectorXd out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] >= 2 ? 1.0 : -1.0;
    return out;
}

std::vector<int> decode_binary(const Eigen::VectorXd& x) {
    std::vector<int> out(x.size());
    for (int i = 0; i < x.size(); ++i) out[i] = x[i] >= 0.0 ? 1 : 0;
    return out;
}

std::vector<int> decode_cluster_sizes(const Eigen::VectorXd& x) {
    std::vector<int> out(x.size());
    for (int i = 0; i < x.size(); ++i) out[i] = x[i] >= 0.0 ? 2 : 1;
    return out;
}

namespace {

Var bind_embeddings(Tape& tape, ParamBinder& binder, const DenoiserHandle& model,
                    const InstanceCond& cond, bool train_mode, Rng* dropout_rng) {
    if (cond.eig) {
        SignNetSpec sn = model.spec->signnet;
        sn.d_emb = model.spec->d_emb;
        return signnet_embed(tape, binder, "signnet", sn, cond.es->base, *cond.eig, train_mode,
                             dropout_rng);
    }
    if (cond.rand_emb.rows() != cond.es->base.num_nodes() ||
        cond.rand_emb.cols() != model.spec->d_emb)
        throw std::invalid_argument("diffusion: rand_emb shape mismatch");
    return tape.input(cond.rand_emb);
}

DenoiserInput make_input(const InstanceCond& cond, const Eigen::VectorXd& v_in,
                         const Eigen::VectorXd& e_in, const Eigen::VectorXd& v_self,
                         const Eigen::VectorXd& e_self, double t, bool train_mode) {
    DenoiserInput in;
    in.es = cond.es;
    in.view = cond.view;
    in.v_noisy = v_in;
    in.e_noisy = e_in;
    in.v_self = v_self;
    in.e_self = e_self;
    in.t = t;
    in.rho_hat = cond.rho_hat;
    in.target_n = cond.target_n;
    in.train_mode = train_mode;
    return in;
}

struct ForwardResult {
    Var v;
    Var e;
};

ForwardResult preconditioned_forward(Tape& tape, ParamBinder& binder,
                                     const DenoiserHandle& model, const InstanceCond& cond,
                                     const Eigen::VectorXd& v_t, const Eigen::VectorXd& e_t,
                                     const Eigen::VectorXd& v_hat, const Eigen::VectorXd& e_hat,
                                     double t, const DiffusionConfig& cfg, bool train_mode,
                                     Rng* dropout_rng) {
    const Weightings w = weightings(t, cfg);
    Var emb = bind_embeddings(tape, binder, model, cond, train_mode, dropout_rng);
    DenoiserInput in = make_input(cond, w.c_in * v_t, w.c_in * e_t, w.c_self * v_hat,
                                  w.c_self * e_hat, t, train_mode);
    DenoiserOutput f = denoiser_forward(tape, binder, *model.spec, in, emb, dropout_rng);
    Var skip_v = tape.input(w.c_skip * v_t);
    Var skip_e = tape.input(w.c_skip * e_t);
    ForwardResult out;
    out.v = tape.add(skip_v, tape.scale(f.v_out, w.c_out));
    out.e = cond.es->expanded_edges() > 0
                ? tape.add(skip_e, tape.scale(f.e_out, w.c_out))
                : tape.input(Eigen::MatrixXd::Zero(0, 1));
    return out;
}

}  // namespace

FeaturePair denoiser_D(const DenoiserHandle& model, const InstanceCond& cond,
                       const Eigen::VectorXd& v_t, const Eigen::VectorXd& e_t,
                       const Eigen::VectorXd& v_hat, const Eigen::VectorXd& e_hat, double t,
                       const DiffusionConfig& cfg) {
    Tape tape;
    ParamBinder binder(tape, *model.store);
    ForwardResult r = preconditioned_forward(tape, binder, model, cond, v_t, e_t, v_hat, e_hat,
                                             t, cfg, /*train_mode=*/false, nullptr);
    return {tape.value(r.v).col(0), tape.value(r.e).col(0)};
}

Eigen::MatrixXd node_embeddings_plain(const DenoiserHandle& model, const InstanceCond& cond) {
    Tape tape;
    ParamBinder binder(tape, *model.store);
    Var emb = bind_embeddings(tape, binder, model, cond, /*train_mode=*/false, nullptr);
    return tape.value(emb);
}

double diffusion_loss(const DenoiserHandle& model, const InstanceCond& cond,
                      const std::vector<int>& v_target, const std::vector<int>& e_target,
                      const DiffusionConfig& cfg, Rng& rng, double grad_scale, bool train_mode,
                      const LossDraws* fixed) {
    const int n = cond.es->expanded_nodes();
    const int m = cond.es->expanded_edges();
    if (static_cast<int>(v_target.size()) != n || static_cast<int>(e_target.size()) != m)
        throw std::invalid_argument("diffusion_loss: target length mismatch");

    const Eigen::VectorXd v0 = encode_cluster_sizes(v_target);
    const Eigen::VectorXd e0 = encode_binary(e_target);

    double t = fixed ? fixed->t
                     : std::exp(rng.normal(cfg.p_mean, cfg.p_std));
    t = std::clamp(t, cfg.sigma_min, cfg.sigma_max);

    const bool self_cond = fixed ? fixed->self_cond : rng.bernoulli(0.5);
    Eigen::VectorXd v_hat = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd e_hat = Eigen::VectorXd::Zero(m);
    if (fixed && self_cond) {
        v_hat = fixed->v_hat;
        e_hat = fixed->e_hat;
    } else if (self_cond) {
        // estimate with zeroed conditioning; gradients do not flow through it
        Eigen::VectorXd v_t(n), e_t(m);
        for (int i = 0; i < n; ++i) v_t[i] = v0[i] + t * rng.normal();
        for (int i = 0; i < m; ++i) e_t[i] = e0[i] + t * rng.normal();
        FeaturePair est = denoiser_D(model, cond, v_t, e_t, Eigen::VectorXd::Zero(n),
                                     Eigen::VectorXd::Zero(m), t, cfg);
        v_hat = est.first;
        e_hat = est.second;
    }

    Eigen::VectorXd v_t(n), e_t(m);
    if (fixed) {
        v_t = v0 + t * fixed->eps_v;
        e_t = e0 + t * fixed->eps_e;
    } else {
        for (int i = 0; i < n; ++i) v_t[i] = v0[i] + t * rng.normal();
        for (int i = 0; i < m; ++i) e_t[i] = e0[i] + t * rng.normal();
    }

    Tape tape;
    ParamBinder binder(tape, *model.store);
    Rng dropout_rng = rng.stream("dropout", rng.next_u64());
    ForwardResult pred = preconditioned_forward(tape, binder, model, cond, v_t, e_t, v_hat,
                                                e_hat, t, cfg, train_mode,
                                                train_mode ? &dropout_rng : nullptr);
    Var loss = tape.sum_squares(tape.sub(pred.v, tape.input(v0)));
    if (m > 0)
        loss = tape.add(loss, tape.sum_squares(tape.sub(pred.e, tape.input(e0))));
    const double value = tape.value(loss)(0, 0);
    if (grad_scale != 0.0) {
        tape.backward(loss);
        binder.accumulate_grads(grad_scale);
    }
    return value;
}

FeaturePair sde_sample_with(const DenoiseFn& denoise, int n, int m, const DiffusionConfig& cfg,
                            Rng& rng) {
    const std::vector<double> ts = time_schedule(cfg);
    Eigen::VectorXd v(n), e(m);
    for (int i = 0; i < n; ++i) v[i] = cfg.sigma_max * rng.normal();
    for (int i = 0; i < m; ++i) e[i] = cfg.sigma_max * rng.normal();
    Eigen::VectorXd v_hat = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd e_hat = Eigen::VectorXd::Zero(m);

    for (int i = 0; i < cfg.n_steps; ++i) {
        const double t_cur = ts[i];
        const double t_next = ts[i + 1];
        const double gamma = gamma_schedule(cfg, t_cur);
        Eigen::VectorXd eps_v(n), eps_e(m);
        for (int j = 0; j < n; ++j) eps_v[j] = cfg.s_noise * rng.normal();
        for (int j = 0; j < m; ++j) eps_e[j] = cfg.s_noise * rng.normal();
        const double t_inflated = t_cur + gamma * t_cur;
        const double churn = std::sqrt(std::max(t_inflated * t_inflated - t_cur * t_cur, 0.0));
        Eigen::VectorXd v_noised = v + churn * eps_v;
        Eigen::VectorXd e_noised = e + churn * eps_e;

        FeaturePair den = denoise(v_noised, e_noised, v_hat, e_hat, t_inflated);
        v_hat = den.first;
        e_hat = den.second;
        Eigen::VectorXd dv = (v_noised - v_hat) / t_inflated;
        Eigen::VectorXd de = (e_noised - e_hat) / t_inflated;
        v = v_noised + (t_next - t_inflated) * dv;
        e = e_noised + (t_next - t_inflated) * de;

        if (t_next > 0.0) {
            FeaturePair den2 = denoise(v, e, v_hat, e_hat, t_next);
            Eigen::VectorXd dv2 = (v - den2.first) / t_next;
            Eigen::VectorXd de2 = (e - den2.second) / t_next;
            v = v_noised + (t_next - t_inflated) * 0.5 * (dv + dv2);
            e = e_noised + (t_next - t_inflated) * 0.5 * (de + de2);
            v_hat = den2.first;
            e_hat = den2.second;
        }
    }
    return {v, e};
}

FeaturePair sde_sample(const DenoiserHandle& model, const InstanceCond& cond,
                       const DiffusionConfig& cfg, Rng& rng) {
    // spectral embeddings do not depend on the diffusion state; evaluate once
    InstanceCond local = cond;
    Eigen::MatrixXd emb = cond.eig ? node_embeddings_plain(model, cond) : cond.rand_emb;
    local.eig = nullptr;
    local.rand_emb = std::move(emb);
    auto denoise = [&](const Eigen::VectorXd& v_t, const Eigen::VectorXd& e_t,
                       const Eigen::VectorXd& v_hat, const Eigen::VectorXd& e_hat, double t) {
        return denoiser_D(model, local, v_t, e_t, v_hat, e_hat, t, cfg);
    };
    return sde_sample_with(denoise, cond.es->expanded_nodes(), cond.es->expanded_edges(), cfg,
                           rng);
}

}  // namespace grex
