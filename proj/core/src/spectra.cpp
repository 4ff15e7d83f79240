#include "grex/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "grex/rng.hpp"

namespace grex {
namespace {

EigPairs take_above_kernel(const Eigen::VectorXd& vals, const Eigen::MatrixXd& vecs,
                           int kernel_dim, int k) {
    const int n = static_cast<int>(vals.size());
    EigPairs out;
    int rows = vecs.rows();
    out.values = Eigen::VectorXd::Zero(k);
    out.vectors = Eigen::MatrixXd::Zero(rows, k);
    int avail = std::max(0, n - kernel_dim);
    int take = std::min(k, avail);
    for (int i = 0; i < take; ++i) {
        out.values[i] = vals[kernel_dim + i];
        out.vectors.col(i) = vecs.col(kernel_dim + i);
    }
    return out;
}

// Lanczos on c*I - L so the sought smallest-of-L eigenpairs become extremal.
EigPairs lanczos_smallest(const Graph& g, int want) {
    const int n = g.num_nodes();
    LaplacianView lv = laplacian(g);
    const Eigen::SparseMatrix<double>& L = lv.matrix;
    const double shift = 2.0 * lv.degrees.maxCoeff() + 1.0;  // Gershgorin bound

    Rng rng(0x5eed5eedull ^ static_cast<std::uint64_t>(n));
    int m = std::min(n, std::max(2 * want + 40, 80));

    for (int attempt = 0; attempt < 4; ++attempt) {
        Eigen::MatrixXd V(n, m + 1);
        Eigen::VectorXd alpha(m), beta(m);
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = rng.normal();
        v.normalize();
        V.col(0) = v;
        int steps = 0;
        for (int j = 0; j < m; ++j) {
            Eigen::VectorXd w = shift * V.col(j) - L * V.col(j);
            alpha[j] = V.col(j).dot(w);
            w -= alpha[j] * V.col(j);
            if (j > 0) w -= beta[j - 1] * V.col(j - 1);
            // full reorthogonalization, twice for stability
            for (int pass = 0; pass < 2; ++pass)
                w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
            beta[j] = w.norm();
            steps = j + 1;
            if (beta[j] < 1e-13) break;  // invariant subspace found
            V.col(j + 1) = w / beta[j];
        }

        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
        for (int j = 0; j < steps; ++j) {
            T(j, j) = alpha[j];
            if (j + 1 < steps) T(j, j + 1) = T(j + 1, j) = beta[j];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        // largest Ritz values of shift*I - L = smallest of L
        const int got = std::min(want, steps);
        Eigen::VectorXd vals(got);
        Eigen::MatrixXd vecs(n, got);
        bool converged = (steps == n);
        double last_beta = steps < m ? 0.0 : beta[steps - 1];
        for (int i = 0; i < got; ++i) {
            int col = steps - 1 - i;  // descending Ritz value
            vals[i] = shift - es.eigenvalues()[col];
            vecs.col(i) = V.leftCols(steps) * es.eigenvectors().col(col);
            vecs.col(i).normalize();
        }
        if (!converged) {
            converged = true;
            for (int i = 0; i < got; ++i) {
                int col = steps - 1 - i;
                double resid = std::abs(last_beta * es.eigenvectors()(steps - 1, col));
                if (resid > 1e-9 * std::max(1.0, shift)) converged = false;
            }
        }
        if (converged || m >= n) {
            EigPairs out;
            out.values = vals;
            out.vectors = vecs;
            return out;
        }
        m = std::min(n, m * 2);
    }
    // fall back to dense if Lanczos failed to converge
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(laplacian_dense(g));
    EigPairs out;
    int got = std::min(want, n);
    out.values = es.eigenvalues().head(got);
    out.vectors = es.eigenvectors().leftCols(got);
    return out;
}

}  // namespace

EigPairs smallest_nonzero_eigenpairs(const Graph& g, int k, int dense_threshold) {
    const int n = g.num_nodes();
    const int kernel = connected_components(g);
    if (k <= 0) return EigPairs{Eigen::VectorXd(0), Eigen::MatrixXd(n, 0)};

    if (n <= dense_threshold) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(laplacian_dense(g));
        return take_above_kernel(es.eigenvalues(), es.eigenvectors(), kernel, k);
    }
    int want = std::min(n, k + kernel);
    EigPairs low = lanczos_smallest(g, want);
    return take_above_kernel(low.values, low.vectors, kernel, k);
}

Eigen::MatrixXd pinv_sqrt(const Eigen::MatrixXd& m, double clamp) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd d = es.eigenvalues();
    for (int i = 0; i < d.size(); ++i) d[i] = d[i] > clamp ? 1.0 / std::sqrt(d[i]) : 0.0;
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace grex
