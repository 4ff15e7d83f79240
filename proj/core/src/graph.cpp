#include "grex/graph.hpp"

#include <algorithm>
#include <queue>

namespace grex {

Graph::Graph(int n, std::vector<Edge> edges,
             std::vector<double> node_feat, std::vector<double> edge_feat)
    : n_(n), edges_(std::move(edges)), node_feat_(std::move(node_feat)),
      edge_feat_(std::move(edge_feat)) {
    for (auto& e : edges_) {
        if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return std::pair(a.u, a.v) < std::pair(b.u, b.v);
    });
    validate();
    build_adjacency();
}

Graph Graph::from_pairs(int n, const std::vector<std::pair<int, int>>& pairs) {
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (auto [u, v] : pairs) edges.push_back({u, v, 1.0});
    return Graph(n, std::move(edges));
}

void Graph::validate() const {
    if (n_ < 0) throw std::invalid_argument("graph: negative node count");
    if (!node_feat_.empty() && static_cast<int>(node_feat_.size()) != n_)
        throw std::invalid_argument("graph: node feature length mismatch");
    if (!edge_feat_.empty() && edge_feat_.size() != edges_.size())
        throw std::invalid_argument("graph: edge feature length mismatch");
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        if (e.u == e.v) throw std::invalid_argument("graph: self-edge");
        if (e.u < 0 || e.v >= n_) throw std::invalid_argument("graph: endpoint out of range");
        if (!(e.w > 0.0)) throw std::invalid_argument("graph: nonpositive weight");
        if (i > 0 && edges_[i - 1].u == e.u && edges_[i - 1].v == e.v)
            throw std::invalid_argument("graph: duplicate edge");
    }
}

void Graph::build_adjacency() {
    adj_.assign(n_, {});
    adj_edge_.assign(n_, {});
    weighted_degree_.assign(n_, 0.0);
    for (int i = 0; i < num_edges(); ++i) {
        const Edge& e = edges_[i];
        adj_[e.u].push_back(e.v);
        adj_edge_[e.u].push_back(i);
        adj_[e.v].push_back(e.u);
        adj_edge_[e.v].push_back(i);
        weighted_degree_[e.u] += e.w;
        weighted_degree_[e.v] += e.w;
    }
    for (int u = 0; u < n_; ++u) {
        // sort neighbor list and keep edge indices aligned
        std::vector<int> order(adj_[u].size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return adj_[u][a] < adj_[u][b]; });
        std::vector<int> nb(order.size());
        std::vector<int> ei(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            nb[i] = adj_[u][order[i]];
            ei[i] = adj_edge_[u][order[i]];
        }
        adj_[u] = std::move(nb);
        adj_edge_[u] = std::move(ei);
    }
}

int Graph::edge_index(int u, int v) const {
    if (u > v) std::swap(u, v);
    if (u < 0 || v >= n_ || u == v) return -1;
    const auto& nb = adj_[u];
    auto it = std::lower_bound(nb.begin(), nb.end(), v);
    if (it == nb.end() || *it != v) return -1;
    return adj_edge_[u][static_cast<std::size_t>(it - nb.begin())];
}

bool Graph::operator==(const Graph& other) const {
    if (n_ != other.n_ || edges_.size() != other.edges_.size()) return false;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (edges_[i].u != other.edges_[i].u || edges_[i].v != other.edges_[i].v ||
            edges_[i].w != other.edges_[i].w)
            return false;
    }
    return node_feat_ == other.node_feat_ && edge_feat_ == other.edge_feat_;
}

LaplacianView laplacian(const Graph& g) {
    const int n = g.num_nodes();
    Eigen::VectorXd deg = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(g.num_edges()) * 2 + n);
    for (const Edge& e : g.edges()) {
        trips.emplace_back(e.u, e.v, -e.w);
        trips.emplace_back(e.v, e.u, -e.w);
        deg[e.u] += e.w;
        deg[e.v] += e.w;
    }
    for (int i = 0; i < n; ++i) trips.emplace_back(i, i, deg[i]);
    Eigen::SparseMatrix<double> L(n, n);
    L.setFromTriplets(trips.begin(), trips.end());
    return LaplacianView{std::move(L), std::move(deg)};
}

Eigen::MatrixXd laplacian_dense(const Graph& g) {
    const int n = g.num_nodes();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (const Edge& e : g.edges()) {
        L(e.u, e.v) -= e.w;
        L(e.v, e.u) -= e.w;
        L(e.u, e.u) += e.w;
        L(e.v, e.v) += e.w;
    }
    return L;
}

Eigen::MatrixXd adjacency_dense(const Graph& g) {
    const int n = g.num_nodes();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (const Edge& e : g.edges()) {
        A(e.u, e.v) = e.w;
        A(e.v, e.u) = e.w;
    }
    return A;
}

std::vector<int> bfs_distances(const Graph& g, int source, int max_depth) {
    std::vector<int> dist(g.num_nodes(), -1);
    std::queue<int> q;
    dist[source] = 0;
    q.push(source);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        if (max_depth >= 0 && dist[u] >= max_depth) continue;
        for (int v : g.neighbors(u)) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push(v);
            }
        }
    }
    return dist;
}

int connected_components(const Graph& g) {
    const int n = g.num_nodes();
    std::vector<char> seen(n, 0);
    int comps = 0;
    for (int s = 0; s < n; ++s) {
        if (seen[s]) continue;
        ++comps;
        std::vector<int> stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : g.neighbors(u)) {
                if (!seen[v]) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
            }
        }
    }
    return comps;
}

bool is_connected(const Graph& g) {
    if (g.num_nodes() <= 1) return true;
    return connected_components(g) == 1;
}

std::vector<std::array<int, 3>> triangles(const Graph& g) {
    std::vector<std::array<int, 3>> out;
    for (const Edge& e : g.edges()) {
        // intersect sorted neighbor lists, keeping k > v so each triple is
        // reported once with i < k_mid < k
        const auto& nu = g.neighbors(e.u);
        const auto& nv = g.neighbors(e.v);
        std::size_t a = 0, b = 0;
        while (a < nu.size() && b < nv.size()) {
            if (nu[a] < nv[b]) {
                ++a;
            } else if (nu[a] > nv[b]) {
                ++b;
            } else {
                if (nu[a] > e.v) out.push_back({e.u, e.v, nu[a]});
                ++a;
                ++b;
            }
        }
    }
    return out;
}

}  // namespace grex
