#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace grex {

struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
};

// Reverse-mode automatic differentiation over dense double matrices.
// Operations record a closure that accumulates adjoints; backward() replays
// them in reverse. One tape instance per loss evaluation.
class Tape {
public:
    Var input(Eigen::MatrixXd value);

    const Eigen::MatrixXd& value(Var v) const { return values_[v.id]; }
    const Eigen::MatrixXd& grad(Var v) const { return grads_[v.id]; }

    Var matmul(Var a, Var b);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var add_rowvec(Var a, Var row);  // row is 1 x cols, broadcast over rows
    Var mul_rowvec(Var a, Var row);
    Var hadamard(Var a, Var b);
    Var scale(Var a, double s);
    Var relu(Var a);
    // Row-wise normalization to zero mean and unit variance; rows whose
    // variance falls below var_floor are scaled by 1/sqrt(var_floor), which
    // maps constant rows to zeros.
    Var layer_norm(Var a, double var_floor = 1e-5);
    Var concat_cols(const std::vector<Var>& parts);
    Var gather_rows(Var a, std::vector<int> idx);
    Var scatter_sum_rows(Var a, std::vector<int> dst, int out_rows);
    Var scale_rows(Var a, Eigen::VectorXd s);      // constant per-row factors
    Var dropout_mask(Var a, Eigen::MatrixXd mask); // constant elementwise mask
    Var sum_squares(Var a);                        // 1x1 result

    // Seeds d(loss)/d(loss) = 1 and accumulates adjoints for every node.
    void backward(Var loss);

    std::size_t size() const { return values_.size(); }

private:
    Var make(Eigen::MatrixXd value, std::function<void()> back);

    std::vector<Eigen::MatrixXd> values_;
    std::vector<Eigen::MatrixXd> grads_;
    std::vector<std::function<void()>> backs_;
};

}  // namespace grex
