#include "grex/planarity.hpp"

#include <algorithm>
#include <vector>

namespace grex {
namespace {

constexpr int kNone = -1;

// Left-right planarity test over a DFS orientation (Brandes' formulation).
// Undirected edge e yields half-edges 2e (u->v) and 2e+1 (v->u); the DFS
// orients each edge in the direction it is first traversed.
struct LRTest {
    const Graph& g;
    int n, m;
    std::vector<int> head;                      // per half-edge: target node
    std::vector<int> height;                    // per node; kNone = unvisited
    std::vector<int> parent_edge;               // per node: incoming tree half-edge
    std::vector<int> lowpt, lowpt2, nesting;    // per half-edge
    std::vector<int> oriented_dir;              // per edge: chosen half-edge or kNone
    std::vector<std::vector<int>> ordered_adj;  // outgoing half-edges by nesting depth
    std::vector<int> ref, side, lowpt_edge, stack_bottom;

    struct Interval {
        int low = kNone;
        int high = kNone;
        bool empty() const { return low == kNone && high == kNone; }
    };
    struct ConflictPair {
        Interval left, right;
        void swap_sides() { std::swap(left, right); }
    };
    std::vector<ConflictPair> stack;

    explicit LRTest(const Graph& graph)
        : g(graph), n(graph.num_nodes()), m(graph.num_edges()) {
        head.resize(2 * m);
        for (int e = 0; e < m; ++e) {
            head[2 * e] = g.edge(e).v;
            head[2 * e + 1] = g.edge(e).u;
        }
        height.assign(n, kNone);
        parent_edge.assign(n, kNone);
        lowpt.assign(2 * m, 0);
        lowpt2.assign(2 * m, 0);
        nesting.assign(2 * m, 0);
        oriented_dir.assign(m, kNone);
        ordered_adj.assign(n, {});
        ref.assign(2 * m, kNone);
        side.assign(2 * m, 1);
        lowpt_edge.assign(2 * m, kNone);
        stack_bottom.assign(2 * m, 0);
    }

    int tail(int he) const { return head[he ^ 1]; }

    void orient_visit(int v) {
        const int pe = parent_edge[v];
        const auto& edges = g.incident_edges(v);
        const auto& nbrs = g.neighbors(v);
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            const int e = edges[i];
            if (oriented_dir[e] != kNone) continue;
            const int w = nbrs[i];
            const int he = g.edge(e).u == v ? 2 * e : 2 * e + 1;  // v -> w
            oriented_dir[e] = he;
            lowpt[he] = height[v];
            lowpt2[he] = height[v];
            if (height[w] == kNone) {  // tree edge
                parent_edge[w] = he;
                height[w] = height[v] + 1;
                orient_visit(w);
            } else {  // back edge toward an ancestor
                lowpt[he] = height[w];
            }
            nesting[he] = 2 * lowpt[he];
            if (lowpt2[he] < height[v]) ++nesting[he];  // chordal, nests tighter
            if (pe != kNone) {
                if (lowpt[he] < lowpt[pe]) {
                    lowpt2[pe] = std::min(lowpt[pe], lowpt2[he]);
                    lowpt[pe] = lowpt[he];
                } else if (lowpt[he] > lowpt[pe]) {
                    lowpt2[pe] = std::min(lowpt2[pe], lowpt[he]);
                } else {
                    lowpt2[pe] = std::min(lowpt2[pe], lowpt2[he]);
                }
            }
        }
    }

    bool conflicting(const Interval& i, int b) const {
        return !i.empty() && lowpt[i.high] > lowpt[b];
    }

    int lowest(const ConflictPair& p) const {
        if (p.left.empty()) return lowpt[p.right.low];
        if (p.right.empty()) return lowpt[p.left.low];
        return std::min(lowpt[p.left.low], lowpt[p.right.low]);
    }

    bool add_constraints(int he, int pe) {
        ConflictPair merged;
        // merge return edges of he into merged.right
        do {
            ConflictPair q = stack.back();
            stack.pop_back();
            if (!q.left.empty()) q.swap_sides();
            if (!q.left.empty()) return false;
            if (lowpt[q.right.low] > lowpt[pe]) {
                if (merged.right.empty())
                    merged.right.high = q.right.high;
                else
                    ref[merged.right.low] = q.right.high;
                merged.right.low = q.right.low;
            } else {
                ref[q.right.low] = lowpt_edge[pe];
            }
        } while (static_cast<int>(stack.size()) > stack_bottom[he]);

        // merge conflicting return edges of earlier siblings into merged.left
        while (!stack.empty() &&
               (conflicting(stack.back().left, he) || conflicting(stack.back().right, he))) {
            ConflictPair q = stack.back();
            stack.pop_back();
            if (conflicting(q.right, he)) q.swap_sides();
            if (conflicting(q.right, he)) return false;
            if (merged.right.low != kNone) ref[merged.right.low] = q.right.high;
            if (q.right.low != kNone) merged.right.low = q.right.low;
            if (merged.left.empty())
                merged.left.high = q.left.high;
            else
                ref[merged.left.low] = q.left.high;
            merged.left.low = q.left.low;
        }
        if (!(merged.left.empty() && merged.right.empty())) stack.push_back(merged);
        return true;
    }

    void trim_back_edges(int u) {
        while (!stack.empty() && lowest(stack.back()) == height[u]) {
            ConflictPair p = stack.back();
            stack.pop_back();
            if (p.left.low != kNone) side[p.left.low] = -1;
        }
        if (stack.empty()) return;
        ConflictPair p = stack.back();
        stack.pop_back();
        while (p.left.high != kNone && head[p.left.high] == u) p.left.high = ref[p.left.high];
        if (p.left.high == kNone && p.left.low != kNone) {
            ref[p.left.low] = p.right.low;
            side[p.left.low] = -1;
            p.left.low = kNone;
        }
        while (p.right.high != kNone && head[p.right.high] == u) p.right.high = ref[p.right.high];
        if (p.right.high == kNone && p.right.low != kNone) {
            ref[p.right.low] = p.left.low;
            side[p.right.low] = -1;
            p.right.low = kNone;
        }
        stack.push_back(p);
    }

    bool test_visit(int v) {
        const int pe = parent_edge[v];
        bool first = true;
        for (int he : ordered_adj[v]) {
            stack_bottom[he] = static_cast<int>(stack.size());
            const int w = head[he];
            if (parent_edge[w] == he) {  // tree edge
                if (!test_visit(w)) return false;
            } else {  // back edge
                lowpt_edge[he] = he;
                stack.push_back(ConflictPair{Interval{}, Interval{he, he}});
            }
            if (lowpt[he] < height[v]) {  // he has a return edge below v
                if (first) {
                    if (pe != kNone) lowpt_edge[pe] = lowpt_edge[he];
                } else if (!add_constraints(he, pe)) {
                    return false;
                }
            }
            first = false;
        }
        if (pe != kNone) {
            const int u = tail(pe);
            trim_back_edges(u);
            if (lowpt[pe] < height[u] && !stack.empty()) {  // pe has its own return edge
                const int hl = stack.back().left.high;
                const int hr = stack.back().right.high;
                ref[pe] = (hl != kNone && (hr == kNone || lowpt[hl] > lowpt[hr])) ? hl : hr;
            }
        }
        return true;
    }

    bool run() {
        if (n > 2 && m > 3 * n - 6) return false;
        std::vector<int> roots;
        for (int v = 0; v < n; ++v) {
            if (height[v] != kNone) continue;
            height[v] = 0;
            roots.push_back(v);
            orient_visit(v);
        }
        for (int e = 0; e < m; ++e) {
            const int he = oriented_dir[e];
            ordered_adj[tail(he)].push_back(he);
        }
        for (int v = 0; v < n; ++v)
            std::sort(ordered_adj[v].begin(), ordered_adj[v].end(),
                      [&](int a, int b) { return nesting[a] < nesting[b]; });
        for (int r : roots)
            if (!test_visit(r)) return false;
        return true;
    }
};

}  // namespace

bool is_planar(const Graph& g) {
    if (g.num_nodes() <= 4) return true;  // every simple graph on <= 4 nodes
    LRTest test(g);
    return test.run();
}

}  // namespace grex
