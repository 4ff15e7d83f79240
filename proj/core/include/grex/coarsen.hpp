#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "grex/graph.hpp"
#include "grex/rng.hpp"

namespace grex {

// Disjoint node clusters covering the node set; every cluster must induce a
// connected subgraph. Cluster index doubles as the coarse node index.
using Partition = std::vector<std::vector<int>>;

struct CoarseningStep {
    Graph parent;
    Graph child;
    Partition partition;
    Eigen::SparseMatrix<double> proj;  // P, n_c x n: 1/|cluster| on members
    Eigen::SparseMatrix<double> lift;  // P^+, n x n_c: 1 on members
};

struct CoarseningSequence {
    std::vector<Graph> levels;          // G_0 (original) .. G_L (singleton)
    std::vector<CoarseningStep> steps;  // steps[l]: levels[l] -> levels[l+1]
    std::vector<double> sigmas;         // per-step spectral error accumulator
    std::vector<Eigen::MatrixXd> a_mats;  // cost-propagation matrix per level
    int preserved_eigs = 0;             // k used for A_0
};

enum class ContractionKind { Edge, Neighborhood };

struct CoarsenConfig {
    ContractionKind family = ContractionKind::Edge;
    int preserved_eigs = 8;      // eigenspace size k guiding the cost
    double rho_min = 0.1;
    double rho_max = 0.3;
    double lambda = 0.3;         // randomization of the greedy selection
    double eig_clamp = 1e-10;    // pseudo-inverse zero threshold
    int small_level = 16;        // below this node count rho is pinned to rho_max
};

void validate_partition(const Graph& g, const Partition& p);

// Canonical form: clusters sorted internally, ordered by smallest member,
// uncovered nodes appended as singletons.
Partition complete_partition(const Graph& g, const Partition& fragment);

// Projection matrix P and its Moore-Penrose pseudoinverse P^+ for a full
// partition of n nodes. P * P^+ is the n_c identity.
std::pair<Eigen::SparseMatrix<double>, Eigen::SparseMatrix<double>>
projection_pair(const Partition& p, int n);

// Contract each cluster to one node; coarse weights are the sums of parent
// weights across each cluster pair.
CoarseningStep contract(const Graph& g, const Partition& p);

// Local variation cost of contracting `candidate` at a level with graph
// `level` and cost-propagation matrix `a_mat`. Nonnegative; zero when the
// relevant rows of a_mat are cluster-constant.
double local_variation_cost(const Graph& level, const Eigen::MatrixXd& a_mat,
                            const std::vector<int>& candidate);

std::vector<std::vector<int>> contraction_family(const Graph& g, ContractionKind kind);

// Greedy randomized selection of disjoint candidate sets until the reduction
// amount m is reached or candidates run out. With lambda = 0 this is the
// deterministic min-cost greedy order; ties break on the lowest candidate
// index.
std::vector<std::vector<int>> rnd_greedy_min_cost_part(
    const std::vector<std::vector<int>>& candidates, const std::vector<double>& costs,
    int m, double lambda, Rng& rng);

// Sample a full coarsening sequence down to a single node.
CoarseningSequence rnd_red_seq(const Graph& g, const CoarsenConfig& cfg, Rng& rng);

// prod(1 + sigma_i) - 1 over the first `steps` steps (all when steps < 0).
double spectral_error_bound(const CoarseningSequence& seq, int steps = -1);

// Composed projections from level 0 down to `level`.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd>
composed_projection(const CoarseningSequence& seq, int level);

}  // namespace grex
