#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace grex {

struct Edge {
    int u = 0;  // canonical: u < v
    int v = 0;
    double w = 1.0;
};

// Sparse undirected weighted graph. Nodes are 0..n-1 internally (file formats
// are 1-indexed). Edges are stored once in canonical (u < v) lexicographic
// order; a directed view for message passing is derived on demand.
// Immutable after construction.
class Graph {
public:
    Graph() = default;
    Graph(int n, std::vector<Edge> edges,
          std::vector<double> node_feat = {}, std::vector<double> edge_feat = {});

    static Graph singleton() { return Graph(1, {}); }

    // Unit-weight convenience constructor from pairs.
    static Graph from_pairs(int n, const std::vector<std::pair<int, int>>& pairs);

    int num_nodes() const { return n_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(int i) const { return edges_[i]; }

    bool has_node_features() const { return !node_feat_.empty(); }
    bool has_edge_features() const { return !edge_feat_.empty(); }
    const std::vector<double>& node_features() const { return node_feat_; }
    const std::vector<double>& edge_features() const { return edge_feat_; }

    // Sorted neighbor lists; parallel array of undirected edge indices.
    const std::vector<int>& neighbors(int u) const { return adj_[u]; }
    const std::vector<int>& incident_edges(int u) const { return adj_edge_[u]; }

    double degree(int u) const { return weighted_degree_[u]; }

    // Index of canonical edge {u, v}, or -1.
    int edge_index(int u, int v) const;
    bool has_edge(int u, int v) const { return edge_index(u, v) >= 0; }

    bool operator==(const Graph& other) const;

private:
    void build_adjacency();
    void validate() const;

    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<double> node_feat_;
    std::vector<double> edge_feat_;
    std::vector<std::vector<int>> adj_;
    std::vector<std::vector<int>> adj_edge_;
    std::vector<double> weighted_degree_;
};

// Combinatorial Laplacian L = D - W together with the degree vector.
struct LaplacianView {
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd degrees;
};

LaplacianView laplacian(const Graph& g);
Eigen::MatrixXd laplacian_dense(const Graph& g);
Eigen::MatrixXd adjacency_dense(const Graph& g);

bool is_connected(const Graph& g);
int connected_components(const Graph& g);

// All unordered triples {i, k, j} whose three edges are present, each once.
std::vector<std::array<int, 3>> triangles(const Graph& g);

// BFS distances from source, -1 when unreachable. max_depth < 0 means unbounded.
std::vector<int> bfs_distances(const Graph& g, int source, int max_depth = -1);

}  // namespace grex
