#pragma once

#include <Eigen/Dense>

#include "grex/graph.hpp"

namespace grex {

struct EigPairs {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // one column per value, unit norm
};

// The k smallest Laplacian eigenpairs above the (numerically zero) kernel.
// The kernel dimension equals the number of connected components and is
// detected structurally, not by tolerance. When fewer than k such pairs
// exist, the result is padded with zero values and zero vectors to exactly
// k columns. Dense solve for n <= dense_threshold, Lanczos with full
// reorthogonalization above.
EigPairs smallest_nonzero_eigenpairs(const Graph& g, int k, int dense_threshold = 512);

// Pseudo-inverse square root of a symmetric PSD matrix. Eigenvalues at or
// below clamp are treated as exact zeros.
Eigen::MatrixXd pinv_sqrt(const Eigen::MatrixXd& m, double clamp = 1e-10);

}  // namespace grex
