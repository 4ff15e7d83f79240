#include "grex/expand.hpp"

#include <stdexcept>

namespace grex {
namespace {

ExpansionState make_state(const Graph& g, const std::vector<int>& v, std::vector<Edge> edges) {
    ExpansionState es;
    es.base = g;
    es.cluster_sizes = v;
    es.cluster_offset.resize(g.num_nodes());
    int total = 0;
    for (int p = 0; p < g.num_nodes(); ++p) {
        es.cluster_offset[p] = total;
        total += v[p];
    }
    es.node_cluster.resize(total);
    for (int p = 0; p < g.num_nodes(); ++p)
        for (int i = 0; i < v[p]; ++i) es.node_cluster[es.cluster_offset[p] + i] = p;
    es.expanded = Graph(total, std::move(edges));
    return es;
}

std::vector<Edge> expansion_edges(const Graph& g, const std::vector<int>& v,
                                  const std::vector<int>& offset) {
    std::vector<Edge> edges;
    for (int p = 0; p < g.num_nodes(); ++p)
        for (int i = 0; i < v[p]; ++i)
            for (int j = i + 1; j < v[p]; ++j)
                edges.push_back({offset[p] + i, offset[p] + j, 1.0});
    for (const Edge& e : g.edges())
        for (int i = 0; i < v[e.u]; ++i)
            for (int j = 0; j < v[e.v]; ++j)
                edges.push_back({offset[e.u] + i, offset[e.v] + j, 1.0});
    return edges;
}

std::vector<int> offsets_of(const Graph& g, const std::vector<int>& v) {
    if (static_cast<int>(v.size()) != g.num_nodes())
        throw std::invalid_argument("expand: cluster size vector length mismatch");
    std::vector<int> offset(g.num_nodes());
    int total = 0;
    for (int p = 0; p < g.num_nodes(); ++p) {
        if (v[p] < 1) throw std::invalid_argument("expand: cluster sizes must be >= 1");
        offset[p] = total;
        total += v[p];
    }
    return offset;
}

}  // namespace

ExpansionState expand(const Graph& g, const std::vector<int>& v) {
    std::vector<int> offset = offsets_of(g, v);
    return make_state(g, v, expansion_edges(g, v, offset));
}

ExpansionState perturbed_expand(const Graph& g, const std::vector<int>& v, int r, double p,
                                Rng& rng) {
    if (r < 0) throw std::invalid_argument("perturbed_expand: radius must be >= 0");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("perturbed_expand: bad probability");
    std::vector<int> offset = offsets_of(g, v);
    std::vector<Edge> edges = expansion_edges(g, v, offset);

    if (r >= 2 && p > 0.0) {
        // extra candidates: cluster pairs at base distance 2..r (distance
        // 0 and 1 pairs are already fully connected by the expansion)
        for (int a = 0; a < g.num_nodes(); ++a) {
            std::vector<int> dist = bfs_distances(g, a, r);
            for (int b = a + 1; b < g.num_nodes(); ++b) {
                if (dist[b] < 2 || dist[b] > r) continue;
                for (int i = 0; i < v[a]; ++i)
                    for (int j = 0; j < v[b]; ++j)
                        if (rng.bernoulli(p))
                            edges.push_back({offset[a] + i, offset[b] + j, 1.0});
            }
        }
    }
    return make_state(g, v, std::move(edges));
}

Graph refine(const ExpansionState& es, const std::vector<int>& e) {
    if (static_cast<int>(e.size()) != es.expanded_edges())
        throw std::invalid_argument("refine: selection vector length mismatch");
    std::vector<Edge> kept;
    for (int i = 0; i < es.expanded_edges(); ++i)
        if (e[i]) kept.push_back(es.expanded.edge(i));
    return Graph(es.expanded_nodes(), std::move(kept));
}

InvertedStep invert_step(const CoarseningStep& step) {
    InvertedStep out;
    const Partition& part = step.partition;
    out.v.resize(part.size());
    for (std::size_t p = 0; p < part.size(); ++p) out.v[p] = static_cast<int>(part[p].size());

    out.state = expand(step.child, out.v);

    // phi maps the i-th member of cluster p to expanded node offset[p] + i;
    // an expanded edge is kept iff its phi-preimage is a parent edge.
    std::vector<int> to_parent(out.state.expanded_nodes());
    for (std::size_t p = 0; p < part.size(); ++p)
        for (std::size_t i = 0; i < part[p].size(); ++i)
            to_parent[out.state.cluster_offset[p] + static_cast<int>(i)] = part[p][i];

    out.e.resize(out.state.expanded_edges());
    for (int i = 0; i < out.state.expanded_edges(); ++i) {
        const Edge& e = out.state.expanded.edge(i);
        out.e[i] = step.parent.has_edge(to_parent[e.u], to_parent[e.v]) ? 1 : 0;
    }
    return out;
}

}  // namespace grex
