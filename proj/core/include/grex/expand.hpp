#pragma once

#include <vector>

#include "grex/coarsen.hpp"
#include "grex/graph.hpp"
#include "grex/rng.hpp"

namespace grex {

// An expanded graph together with the bookkeeping that ties every expanded
// node back to its base cluster. Node order is cluster-major: clusters in
// base-node order, replicas in index order. Edge-selection vectors index the
// expanded graph's canonical (lexicographic) edge order.
struct ExpansionState {
    Graph base;
    std::vector<int> cluster_sizes;   // v, one entry per base node
    Graph expanded;
    std::vector<int> node_cluster;    // expanded node -> base node
    std::vector<int> cluster_offset;  // base node -> first replica index

    int expanded_nodes() const { return expanded.num_nodes(); }
    int expanded_edges() const { return expanded.num_edges(); }
};

// Replace each base node p by a clique of v[p] replicas and connect adjacent
// clusters completely.
ExpansionState expand(const Graph& g, const std::vector<int>& v);

// Expansion plus independent extra edges between clusters at base distance
// at most r, each with probability p. (r, p) = (0, .) or (., 0) reproduces
// expand bitwise.
ExpansionState perturbed_expand(const Graph& g, const std::vector<int>& v, int r, double p,
                                Rng& rng);

// Keep exactly the expanded edges with e[i] = 1; node set unchanged.
Graph refine(const ExpansionState& es, const std::vector<int>& e);

struct InvertedStep {
    std::vector<int> v;  // cluster size vector, diffusion node target
    std::vector<int> e;  // edge selection vector, diffusion edge target
    ExpansionState state;
};

// Recover the expansion/refinement pair that inverts a coarsening step:
// refine(expand(child, v), e) is isomorphic to the parent.
InvertedStep invert_step(const CoarseningStep& step);

}  // namespace grex
