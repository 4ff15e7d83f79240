#pragma once

#include <Eigen/Dense>
#include <string>
#include <unordered_map>
#include <vector>

#include "grex/rng.hpp"
#include "grex/tape.hpp"

namespace grex {

// Named parameter arrays with paired gradient buffers and an EMA shadow copy.
// Iteration order is insertion order, which keeps optimizer updates and
// checkpoints deterministic.
class ParamStore {
public:
    Eigen::MatrixXd& add(const std::string& name, int rows, int cols);
    bool contains(const std::string& name) const { return index_.count(name) > 0; }
    int find(const std::string& name) const;

    int size() const { return static_cast<int>(names_.size()); }
    const std::string& name(int i) const { return names_[i]; }
    Eigen::MatrixXd& value(int i) { return values_[i]; }
    const Eigen::MatrixXd& value(int i) const { return values_[i]; }
    Eigen::MatrixXd& value(const std::string& name) { return values_[find(name)]; }
    Eigen::MatrixXd& grad(int i) { return grads_[i]; }
    const Eigen::MatrixXd& grad(int i) const { return grads_[i]; }
    Eigen::MatrixXd& ema(int i) { return emas_[i]; }
    const Eigen::MatrixXd& ema(int i) const { return emas_[i]; }

    void zero_grad();
    void reset_ema();             // shadow <- params
    void swap_in_ema();           // exchange params and shadow (and back)
    long long parameter_count() const;

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
    std::vector<Eigen::MatrixXd> values_;
    std::vector<Eigen::MatrixXd> grads_;
    std::vector<Eigen::MatrixXd> emas_;
};

// Binds store parameters into a tape as leaves and harvests their adjoints
// after backward().
class ParamBinder {
public:
    ParamBinder(Tape& tape, ParamStore& store) : tape_(tape), store_(store) {}

    Var operator()(const std::string& name);
    // store.grad += tape adjoints, scaled
    void accumulate_grads(double scale = 1.0);

private:
    Tape& tape_;
    ParamStore& store_;
    std::vector<std::pair<int, Var>> bound_;
    std::unordered_map<int, int> seen_;
};

struct MlpSpec {
    int in_dim = 1;
    int hidden_dim = 1;
    int out_dim = 1;
};

// Two hidden layers, each followed by layer normalization (with affine
// scale/shift) and ReLU; the second hidden layer carries the output width.
void mlp_init(ParamStore& store, const std::string& prefix, const MlpSpec& spec, Rng& rng);
Var mlp_forward(Tape& tape, ParamBinder& params, const std::string& prefix,
                const MlpSpec& spec, Var x);
Eigen::MatrixXd mlp_forward(ParamStore& store, const std::string& prefix, const MlpSpec& spec,
                            const Eigen::MatrixXd& x);

Var linear(Tape& tape, ParamBinder& params, const std::string& prefix, Var x);
void linear_init(ParamStore& store, const std::string& prefix, int in_dim, int out_dim,
                 Rng& rng, double scale = 1.0);

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

class AdamState {
public:
    void ensure(const ParamStore& store);
    // Bias-corrected update from store.grad, in place; t is the 1-based step.
    void step(ParamStore& store, const AdamConfig& cfg);
    long long steps_taken() const { return t_; }
    void set_steps(long long t) { t_ = t; }

    std::vector<Eigen::MatrixXd>& first_moments() { return m_; }
    std::vector<Eigen::MatrixXd>& second_moments() { return v_; }

private:
    std::vector<Eigen::MatrixXd> m_, v_;
    long long t_ = 0;
};

// shadow <- coeff * shadow + (1 - coeff) * params
void ema_update(ParamStore& store, double coeff);

// Interleaved sin/cos encoding at geometric frequencies (base 10000):
// out[2i] = sin(value / 10000^(2i/dim)), out[2i+1] = cos(...).
Eigen::VectorXd sinusoidal_encoding(double value, int dim);

// Inverted-scaling dropout mask: entries are 0 with probability drop_prob
// and 1/(1-drop_prob) otherwise.
Eigen::MatrixXd dropout_mask(int rows, int cols, double drop_prob, Rng& rng);

}  // namespace grex
