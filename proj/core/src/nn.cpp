#include "grex/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace grex {

Eigen::MatrixXd& ParamStore::add(const std::string& name, int rows, int cols) {
    if (contains(name)) throw std::invalid_argument("param already exists: " + name);
    index_[name] = static_cast<int>(names_.size());
    names_.push_back(name);
    values_.push_back(Eigen::MatrixXd::Zero(rows, cols));
    grads_.push_back(Eigen::MatrixXd::Zero(rows, cols));
    emas_.push_back(Eigen::MatrixXd::Zero(rows, cols));
    return values_.back();
}

int ParamStore::find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("no such param: " + name);
    return it->second;
}

void ParamStore::zero_grad() {
    for (auto& g : grads_) g.setZero();
}

void ParamStore::reset_ema() {
    for (int i = 0; i < size(); ++i) emas_[i] = values_[i];
}

void ParamStore::swap_in_ema() {
    for (int i = 0; i < size(); ++i) values_[i].swap(emas_[i]);
}

long long ParamStore::parameter_count() const {
    long long total = 0;
    for (const auto& v : values_) total += v.size();
    return total;
}

Var ParamBinder::operator()(const std::string& name) {
    const int idx = store_.find(name);
    auto it = seen_.find(idx);
    if (it != seen_.end()) return bound_[it->second].second;
    Var v = tape_.input(store_.value(idx));
    seen_[idx] = static_cast<int>(bound_.size());
    bound_.emplace_back(idx, v);
    return v;
}

void ParamBinder::accumulate_grads(double scale) {
    for (auto& [idx, var] : bound_) store_.grad(idx) += scale * tape_.grad(var);
}

void linear_init(ParamStore& store, const std::string& prefix, int in_dim, int out_dim,
                 Rng& rng, double scale) {
    store.add(prefix + ".w", in_dim, out_dim);
    store.add(prefix + ".b", 1, out_dim);
    // re-resolve after both insertions; add() can relocate earlier arrays
    Eigen::MatrixXd& w = store.value(prefix + ".w");
    const double std = scale * std::sqrt(2.0 / static_cast<double>(in_dim));
    for (int i = 0; i < w.rows(); ++i)
        for (int j = 0; j < w.cols(); ++j) w(i, j) = rng.normal(0.0, std);
    // uniform nonzero bias; an all-zero bias can leave ReLU units through a
    // dead row parked exactly on their kink at initialization
    Eigen::MatrixXd& b = store.value(prefix + ".b");
    const double bound = scale / std::sqrt(static_cast<double>(in_dim));
    for (int j = 0; j < b.cols(); ++j) b(0, j) = rng.uniform(-bound, bound);
}

Var linear(Tape& tape, ParamBinder& params, const std::string& prefix, Var x) {
    return tape.add_rowvec(tape.matmul(x, params(prefix + ".w")), params(prefix + ".b"));
}

namespace {

void norm_init(ParamStore& store, const std::string& prefix, int dim) {
    store.add(prefix + ".g", 1, dim).setOnes();
    store.add(prefix + ".s", 1, dim);
}

Var norm_affine(Tape& tape, ParamBinder& params, const std::string& prefix, Var x) {
    Var y = tape.layer_norm(x);
    return tape.add_rowvec(tape.mul_rowvec(y, params(prefix + ".g")), params(prefix + ".s"));
}

}  // namespace

void mlp_init(ParamStore& store, const std::string& prefix, const MlpSpec& spec, Rng& rng) {
    if (spec.in_dim < 1 || spec.hidden_dim < 1 || spec.out_dim < 1)
        throw std::invalid_argument("mlp_init: dims must be >= 1");
    linear_init(store, prefix + ".l1", spec.in_dim, spec.hidden_dim, rng);
    norm_init(store, prefix + ".n1", spec.hidden_dim);
    linear_init(store, prefix + ".l2", spec.hidden_dim, spec.out_dim, rng);
    norm_init(store, prefix + ".n2", spec.out_dim);
}

Var mlp_forward(Tape& tape, ParamBinder& params, const std::string& prefix,
                const MlpSpec& spec, Var x) {
    if (tape.value(x).cols() != spec.in_dim)
        throw std::invalid_argument("mlp_forward: input width mismatch");
    Var h = linear(tape, params, prefix + ".l1", x);
    h = tape.relu(norm_affine(tape, params, prefix + ".n1", h));
    h = linear(tape, params, prefix + ".l2", h);
    return tape.relu(norm_affine(tape, params, prefix + ".n2", h));
}

Eigen::MatrixXd mlp_forward(ParamStore& store, const std::string& prefix, const MlpSpec& spec,
                            const Eigen::MatrixXd& x) {
    Tape tape;
    ParamBinder binder(tape, store);
    return tape.value(mlp_forward(tape, binder, prefix, spec, tape.input(x)));
}

void AdamState::ensure(const ParamStore& store) {
    if (static_cast<int>(m_.size()) == store.size()) return;
    m_.clear();
    v_.clear();
    for (int i = 0; i < store.size(); ++i) {
        m_.push_back(Eigen::MatrixXd::Zero(store.value(i).rows(), store.value(i).cols()));
        v_.push_back(Eigen::MatrixXd::Zero(store.value(i).rows(), store.value(i).cols()));
    }
}

void AdamState::step(ParamStore& store, const AdamConfig& cfg) {
    ensure(store);
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
    for (int i = 0; i < store.size(); ++i) {
        const Eigen::MatrixXd& g = store.grad(i);
        m_[i] = cfg.beta1 * m_[i] + (1.0 - cfg.beta1) * g;
        v_[i] = cfg.beta2 * v_[i] + (1.0 - cfg.beta2) * g.cwiseProduct(g);
        store.value(i).array() -=
            cfg.lr * (m_[i].array() / bc1) / ((v_[i].array() / bc2).sqrt() + cfg.eps);
    }
}

void ema_update(ParamStore& store, double coeff) {
    if (coeff < 0.0 || coeff >= 1.0) throw std::invalid_argument("ema_update: bad coefficient");
    for (int i = 0; i < store.size(); ++i)
        store.ema(i) = coeff * store.ema(i) + (1.0 - coeff) * store.value(i);
}

Eigen::VectorXd sinusoidal_encoding(double value, int dim) {
    if (dim < 2 || dim % 2 != 0)
        throw std::invalid_argument("sinusoidal_encoding: dim must be even and >= 2");
    Eigen::VectorXd out(dim);
    for (int i = 0; i < dim / 2; ++i) {
        const double freq = std::pow(10000.0, -2.0 * i / static_cast<double>(dim));
        out[2 * i] = std::sin(value * freq);
        out[2 * i + 1] = std::cos(value * freq);
    }
    return out;
}

Eigen::MatrixXd dropout_mask(int rows, int cols, double drop_prob, Rng& rng) {
    if (drop_prob <= 0.0) return Eigen::MatrixXd::Ones(rows, cols);
    const double keep = 1.0 / (1.0 - drop_prob);
    Eigen::MatrixXd mask(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) mask(i, j) = rng.bernoulli(drop_prob) ? 0.0 : keep;
    return mask;
}

}  // namespace grex
