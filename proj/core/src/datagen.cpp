#include "grex/datagen.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "grex/delaunay.hpp"

namespace grex {

Graph gen_planar(int n, Rng& rng) {
    if (n < 3) throw std::invalid_argument("gen_planar: need n >= 3");
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<std::pair<double, double>> pts(n);
        for (auto& [x, y] : pts) {
            x = rng.uniform();
            y = rng.uniform();
        }
        if (auto g = delaunay_triangulation(pts)) return std::move(*g);
    }
    throw std::runtime_error("gen_planar: repeated degenerate point sets");
}

Graph gen_tree(int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("gen_tree: need n >= 1");
    if (n == 1) return Graph::singleton();
    if (n == 2) return Graph::from_pairs(2, {{0, 1}});

    std::vector<int> pruefer(n - 2);
    for (int& x : pruefer) x = static_cast<int>(rng.uniform_int(n));
    std::vector<int> degree(n, 1);
    for (int x : pruefer) ++degree[x];

    std::priority_queue<int, std::vector<int>, std::greater<>> leaves;
    for (int i = 0; i < n; ++i)
        if (degree[i] == 1) leaves.push(i);

    std::vector<std::pair<int, int>> edges;
    for (int x : pruefer) {
        const int leaf = leaves.top();
        leaves.pop();
        edges.emplace_back(leaf, x);
        if (--degree[x] == 1) leaves.push(x);
    }
    const int a = leaves.top();
    leaves.pop();
    const int b = leaves.top();
    edges.emplace_back(a, b);
    return Graph::from_pairs(n, edges);
}

Graph gen_sbm(const std::vector<int>& community_sizes, double p_in, double p_out, Rng& rng,
              bool require_connected) {
    const int n = std::accumulate(community_sizes.begin(), community_sizes.end(), 0);
    std::vector<int> block;
    for (std::size_t c = 0; c < community_sizes.size(); ++c)
        block.insert(block.end(), community_sizes[c], static_cast<int>(c));

    for (int attempt = 0; attempt < 5000; ++attempt) {
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.bernoulli(block[i] == block[j] ? p_in : p_out)) edges.emplace_back(i, j);
        Graph g = Graph::from_pairs(n, edges);
        if (!require_connected || is_connected(g)) return g;
    }
    throw std::runtime_error("gen_sbm: could not draw a connected sample");
}

std::vector<Graph> generate_dataset(const DatasetSpec& spec, Rng& rng) {
    if (spec.count <= 0) throw std::invalid_argument("generate_dataset: count must be > 0");
    std::vector<Graph> out;
    out.reserve(spec.count);
    for (int i = 0; i < spec.count; ++i) {
        if (spec.kind == DatasetKind::Sbm) {
            const int communities =
                spec.min_communities +
                static_cast<int>(rng.uniform_int(spec.max_communities - spec.min_communities + 1));
            std::vector<int> sizes(communities);
            for (int& s : sizes)
                s = spec.min_community_size +
                    static_cast<int>(
                        rng.uniform_int(spec.max_community_size - spec.min_community_size + 1));
            out.push_back(gen_sbm(sizes, spec.p_in, spec.p_out, rng));
            continue;
        }
        const auto& range = spec.size_ranges[rng.uniform_int(spec.size_ranges.size())];
        const int n = range.first + static_cast<int>(rng.uniform_int(range.second - range.first + 1));
        out.push_back(spec.kind == DatasetKind::Planar ? gen_planar(n, rng) : gen_tree(n, rng));
    }
    return out;
}

DatasetSpec dataset_preset(const std::string& name) {
    DatasetSpec spec;
    if (name == "planar") {
        spec.kind = DatasetKind::Planar;
    } else if (name == "tree") {
        spec.kind = DatasetKind::Tree;
    } else if (name == "sbm") {
        spec.kind = DatasetKind::Sbm;
    } else if (name == "planar-extrapolation" || name == "tree-extrapolation") {
        spec.kind = name[0] == 'p' ? DatasetKind::Planar : DatasetKind::Tree;
        spec.count = 128;
        spec.size_ranges = {{32, 64}};
    } else if (name == "planar-interpolation" || name == "tree-interpolation") {
        spec.kind = name[0] == 'p' ? DatasetKind::Planar : DatasetKind::Tree;
        spec.count = 128;
        spec.size_ranges = {{32, 64}, {128, 160}};
    } else {
        throw std::invalid_argument("unknown dataset preset: " + name);
    }
    return spec;
}

SplitIndices split(int count, std::uint64_t seed) {
    std::vector<int> order(count);
    std::iota(order.begin(), order.end(), 0);
    Rng rng = Rng(seed).stream("split");
    for (int i = count - 1; i > 0; --i)
        std::swap(order[i], order[rng.uniform_int(static_cast<std::uint64_t>(i) + 1)]);

    const int n_test = count / 5;
    const int n_train = 4 * (count - n_test) / 5;
    SplitIndices out;
    out.test.assign(order.begin(), order.begin() + n_test);
    out.train.assign(order.begin() + n_test, order.begin() + n_test + n_train);
    out.val.assign(order.begin() + n_test + n_train, order.end());
    return out;
}

}  // namespace grex
