#include "grex/tape.hpp"

#include <cmath>
#include <stdexcept>

namespace grex {

Var Tape::make(Eigen::MatrixXd value, std::function<void()> back) {
    values_.push_back(std::move(value));
    grads_.emplace_back();
    backs_.push_back(std::move(back));
    return Var{static_cast<int>(values_.size()) - 1};
}

Var Tape::input(Eigen::MatrixXd value) { return make(std::move(value), nullptr); }

namespace {
void accumulate(Eigen::MatrixXd& g, const Eigen::MatrixXd& delta) {
    if (g.size() == 0)
        g = delta;
    else
        g += delta;
}
}  // namespace

Var Tape::matmul(Var a, Var b) {
    Eigen::MatrixXd out = values_[a.id] * values_[b.id];
    return make(std::move(out), [this, a, b, self = static_cast<int>(values_.size())]() {
        const Eigen::MatrixXd& g = grads_[self];
        accumulate(grads_[a.id], g * values_[b.id].transpose());
        accumulate(grads_[b.id], values_[a.id].transpose() * g);
    });
}

Var Tape::add(Var a, Var b) {
    return make(values_[a.id] + values_[b.id],
                [this, a, b, self = static_cast<int>(values_.size())]() {
                    accumulate(grads_[a.id], grads_[self]);
                    accumulate(grads_[b.id], grads_[self]);
                });
}

Var Tape::sub(Var a, Var b) {
    return make(values_[a.id] - values_[b.id],
                [this, a, b, self = static_cast<int>(values_.size())]() {
                    accumulate(grads_[a.id], grads_[self]);
                    accumulate(grads_[b.id], -grads_[self]);
                });
}

Var Tape::add_rowvec(Var a, Var row) {
    Eigen::MatrixXd out = values_[a.id];
    out.rowwise() += values_[row.id].row(0);
    return make(std::move(out), [this, a, row, self = static_cast<int>(values_.size())]() {
        accumulate(grads_[a.id], grads_[self]);
        accumulate(grads_[row.id], grads_[self].colwise().sum());
    });
}

Var Tape::mul_rowvec(Var a, Var row) {
    Eigen::MatrixXd out = values_[a.id].array().rowwise() *
                          values_[row.id].row(0).array();
    return make(std::move(out), [this, a, row, self = static_cast<int>(values_.size())]() {
        const Eigen::MatrixXd& g = grads_[self];
        accumulate(grads_[a.id],
                   (g.array().rowwise() * values_[row.id].row(0).array()).matrix());
        accumulate(grads_[row.id],
                   (g.array() * values_[a.id].array()).colwise().sum().matrix());
    });
}

Var Tape::hadamard(Var a, Var b) {
    return make(values_[a.id].cwiseProduct(values_[b.id]),
                [this, a, b, self = static_cast<int>(values_.size())]() {
                    accumulate(grads_[a.id], grads_[self].cwiseProduct(values_[b.id]));
                    accumulate(grads_[b.id], grads_[self].cwiseProduct(values_[a.id]));
                });
}

Var Tape::scale(Var a, double s) {
    return make(values_[a.id] * s, [this, a, s, self = static_cast<int>(values_.size())]() {
        accumulate(grads_[a.id], grads_[self] * s);
    });
}

Var Tape::relu(Var a) {
    return make(values_[a.id].cwiseMax(0.0),
                [this, a, self = static_cast<int>(values_.size())]() {
                    Eigen::MatrixXd mask =
                        (values_[a.id].array() > 0.0).cast<double>().matrix();
                    accumulate(grads_[a.id], grads_[self].cwiseProduct(mask));
                });
}

Var Tape::layer_norm(Var a, double var_floor) {
    const Eigen::MatrixXd& x = values_[a.id];
    const int rows = static_cast<int>(x.rows());
    const int cols = static_cast<int>(x.cols());
    Eigen::VectorXd mean(rows), inv_std(rows);
    Eigen::VectorXd floored(rows);
    Eigen::MatrixXd out(rows, cols);
    for (int r = 0; r < rows; ++r) {
        mean[r] = x.row(r).mean();
        double var = (x.row(r).array() - mean[r]).square().mean();
        bool hit_floor = var <= var_floor;
        floored[r] = hit_floor ? 1.0 : 0.0;
        inv_std[r] = 1.0 / std::sqrt(hit_floor ? var_floor : var);
        out.row(r) = (x.row(r).array() - mean[r]) * inv_std[r];
    }
    return make(std::move(out), [this, a, mean, inv_std, floored, cols,
                                 self = static_cast<int>(values_.size())]() {
        const Eigen::MatrixXd& g = grads_[self];
        const Eigen::MatrixXd& y = values_[self];
        Eigen::MatrixXd gx(g.rows(), g.cols());
        const double inv_n = 1.0 / static_cast<double>(cols);
        for (int r = 0; r < g.rows(); ++r) {
            const double gmean = g.row(r).mean();
            if (floored[r] > 0.5) {
                gx.row(r) = (g.row(r).array() - gmean) * inv_std[r];
            } else {
                const double gy = (g.row(r).array() * y.row(r).array()).sum() * inv_n;
                gx.row(r) =
                    (g.row(r).array() - gmean - y.row(r).array() * gy) * inv_std[r];
            }
        }
        accumulate(grads_[a.id], gx);
    });
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_cols: empty");
    const int rows = static_cast<int>(values_[parts[0].id].rows());
    int cols = 0;
    for (Var p : parts) cols += static_cast<int>(values_[p.id].cols());
    Eigen::MatrixXd out(rows, cols);
    int at = 0;
    std::vector<int> offsets;
    for (Var p : parts) {
        const auto& v = values_[p.id];
        offsets.push_back(at);
        out.middleCols(at, static_cast<int>(v.cols())) = v;
        at += static_cast<int>(v.cols());
    }
    return make(std::move(out), [this, parts, offsets,
                                 self = static_cast<int>(values_.size())]() {
        const Eigen::MatrixXd& g = grads_[self];
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const int w = static_cast<int>(values_[parts[i].id].cols());
            accumulate(grads_[parts[i].id], g.middleCols(offsets[i], w));
        }
    });
}

Var Tape::gather_rows(Var a, std::vector<int> idx) {
    const Eigen::MatrixXd& x = values_[a.id];
    Eigen::MatrixXd out(static_cast<int>(idx.size()), x.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<int>(i)) = x.row(idx[i]);
    return make(std::move(out), [this, a, idx = std::move(idx),
                                 self = static_cast<int>(values_.size())]() {
        const Eigen::MatrixXd& g = grads_[self];
        Eigen::MatrixXd& ga = grads_[a.id];
        if (ga.size() == 0) ga = Eigen::MatrixXd::Zero(values_[a.id].rows(), values_[a.id].cols());
        for (std::size_t i = 0; i < idx.size(); ++i) ga.row(idx[i]) += g.row(static_cast<int>(i));
    });
}

Var Tape::scatter_sum_rows(Var a, std::vector<int> dst, int out_rows) {
    const Eigen::MatrixXd& x = values_[a.id];
    if (static_cast<int>(dst.size()) != x.rows())
        throw std::invalid_argument("scatter_sum_rows: index length mismatch");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(out_rows, x.cols());
    for (int i = 0; i < x.rows(); ++i) out.row(dst[i]) += x.row(i);
    return make(std::move(out), [this, a, dst = std::move(dst),
                                 self = static_cast<int>(values_.size())]() {
        const Eigen::MatrixXd& g = grads_[self];
        Eigen::MatrixXd ga(values_[a.id].rows(), values_[a.id].cols());
        for (int i = 0; i < ga.rows(); ++i) ga.row(i) = g.row(dst[i]);
        accumulate(grads_[a.id], ga);
    });
}

Var Tape::scale_rows(Var a, Eigen::VectorXd s) {
    Eigen::MatrixXd out = s.asDiagonal() * values_[a.id];
    return make(std::move(out), [this, a, s = std::move(s),
                                 self = static_cast<int>(values_.size())]() {
        accumulate(grads_[a.id], s.asDiagonal() * grads_[self]);
    });
}

Var Tape::dropout_mask(Var a, Eigen::MatrixXd mask) {
    Eigen::MatrixXd out = values_[a.id].cwiseProduct(mask);
    return make(std::move(out), [this, a, mask = std::move(mask),
                                 self = static_cast<int>(values_.size())]() {
        accumulate(grads_[a.id], grads_[self].cwiseProduct(mask));
    });
}

Var Tape::sum_squares(Var a) {
    Eigen::MatrixXd out(1, 1);
    out(0, 0) = values_[a.id].squaredNorm();
    return make(std::move(out), [this, a, self = static_cast<int>(values_.size())]() {
        accumulate(grads_[a.id], 2.0 * grads_[self](0, 0) * values_[a.id]);
    });
}

void Tape::backward(Var loss) {
    if (!loss.valid()) throw std::invalid_argument("backward: invalid loss var");
    for (std::size_t i = 0; i < grads_.size(); ++i) grads_[i].resize(0, 0);
    grads_[loss.id] = Eigen::MatrixXd::Ones(values_[loss.id].rows(), values_[loss.id].cols());
    for (int i = static_cast<int>(backs_.size()) - 1; i >= 0; --i) {
        if (backs_[i] && grads_[i].size() != 0) backs_[i]();
    }
    // untouched nodes report zero gradients
    for (std::size_t i = 0; i < grads_.size(); ++i)
        if (grads_[i].size() == 0)
            grads_[i] = Eigen::MatrixXd::Zero(values_[i].rows(), values_[i].cols());
}

}  // namespace grex
