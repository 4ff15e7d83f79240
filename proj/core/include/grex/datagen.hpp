#pragma once

#include <string>
#include <vector>

#include "grex/graph.hpp"
#include "grex/rng.hpp"

namespace grex {

enum class DatasetKind { Planar, Tree, Sbm };

struct DatasetSpec {
    DatasetKind kind = DatasetKind::Tree;
    int count = 200;
    // node-count ranges sampled uniformly (range first, then size within it)
    std::vector<std::pair<int, int>> size_ranges{{64, 64}};
    // SBM parameters
    int min_communities = 2;
    int max_communities = 5;
    int min_community_size = 20;
    int max_community_size = 40;
    double p_in = 0.3;
    double p_out = 0.05;
};

// Delaunay triangulation of n uniform points in the unit square; degenerate
// point sets are resampled.
Graph gen_planar(int n, Rng& rng);

// Uniform random labeled tree via a random Pruefer sequence.
Graph gen_tree(int n, Rng& rng);

// Stochastic block model with the given community sizes; resampled until
// connected unless require_connected is false (raw mode).
Graph gen_sbm(const std::vector<int>& community_sizes, double p_in, double p_out, Rng& rng,
              bool require_connected = true);

std::vector<Graph> generate_dataset(const DatasetSpec& spec, Rng& rng);

// Named recipes: planar | tree | sbm (200 graphs, benchmark sizes) and the
// size-generalization variants planar-extrapolation | tree-extrapolation
// (128 graphs, sizes in [32,64]) and *-interpolation ([32,64] u [128,160]).
DatasetSpec dataset_preset(const std::string& name);

struct SplitIndices {
    std::vector<int> train;
    std::vector<int> val;
    std::vector<int> test;
};

// Deterministic shuffled split: 20% test (floored), then 80% of the rest for
// training; 200 graphs split 128/32/40.
SplitIndices split(int count, std::uint64_t seed);

}  // namespace grex
