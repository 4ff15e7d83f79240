#include "grex/wl.hpp"

#include <algorithm>
#include <stdexcept>

namespace grex {
namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t x) {
    h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    return h;
}

// One refinement pass: color' = hash(color, sorted multiset of neighbor colors).
std::vector<std::uint64_t> refine(const Graph& g, const std::vector<std::uint64_t>& color) {
    std::vector<std::uint64_t> next(color.size());
    std::vector<std::uint64_t> nb;
    for (int u = 0; u < g.num_nodes(); ++u) {
        nb.clear();
        for (int v : g.neighbors(u)) nb.push_back(color[v]);
        std::sort(nb.begin(), nb.end());
        std::uint64_t h = mix(0x2545f4914f6cdd1dull, color[u]);
        for (std::uint64_t c : nb) h = mix(h, c);
        next[u] = h;
    }
    return next;
}

std::vector<std::uint64_t> wl_colors(const Graph& g, int rounds) {
    std::vector<std::uint64_t> color(g.num_nodes(), 1);
    for (int r = 0; r < rounds; ++r) color = refine(g, color);
    return color;
}

}  // namespace

std::uint64_t wl_hash(const Graph& g, int rounds) {
    if (rounds < 1) throw std::invalid_argument("wl_hash: rounds must be >= 1");
    std::vector<std::uint64_t> color = wl_colors(g, rounds);
    std::sort(color.begin(), color.end());
    std::uint64_t h = mix(0x853c49e6748fea9bull, static_cast<std::uint64_t>(g.num_nodes()));
    h = mix(h, static_cast<std::uint64_t>(g.num_edges()));
    for (std::uint64_t c : color) h = mix(h, c);
    return h;
}

namespace {

struct IsoSearch {
    const Graph& a;
    const Graph& b;
    std::vector<std::uint64_t> ca, cb;
    std::vector<int> map_ab;   // a-node -> b-node or -1
    std::vector<char> used_b;
    std::vector<int> order;    // a-nodes, most-constrained first

    bool feasible(int x, int y) const {
        if (ca[x] != cb[y]) return false;
        if (a.neighbors(x).size() != b.neighbors(y).size()) return false;
        // adjacency must agree with every already-mapped node
        for (int xn = 0; xn < a.num_nodes(); ++xn) {
            int yn = map_ab[xn];
            if (yn < 0) continue;
            if (a.has_edge(x, xn) != b.has_edge(y, yn)) return false;
        }
        return true;
    }

    bool extend(std::size_t depth) {
        if (depth == order.size()) return true;
        int x = order[depth];
        for (int y = 0; y < b.num_nodes(); ++y) {
            if (used_b[y] || !feasible(x, y)) continue;
            map_ab[x] = y;
            used_b[y] = 1;
            if (extend(depth + 1)) return true;
            map_ab[x] = -1;
            used_b[y] = 0;
        }
        return false;
    }
};

}  // namespace

bool is_isomorphic(const Graph& a, const Graph& b) {
    if (a.num_nodes() != b.num_nodes() || a.num_edges() != b.num_edges()) return false;
    const int n = a.num_nodes();
    if (n == 0) return true;

    const int rounds = 3;
    IsoSearch s{a, b, wl_colors(a, rounds), wl_colors(b, rounds), {}, {}, {}};
    {
        // color multisets must agree
        auto ma = s.ca;
        auto mb = s.cb;
        std::sort(ma.begin(), ma.end());
        std::sort(mb.begin(), mb.end());
        if (ma != mb) return false;
    }
    s.map_ab.assign(n, -1);
    s.used_b.assign(n, 0);
    s.order.resize(n);
    for (int i = 0; i < n; ++i) s.order[i] = i;
    // rarest color class first, high degree breaking ties
    std::vector<int> freq_of(n);
    {
        std::vector<std::uint64_t> sorted = s.ca;
        std::sort(sorted.begin(), sorted.end());
        for (int i = 0; i < n; ++i) {
            auto lo = std::lower_bound(sorted.begin(), sorted.end(), s.ca[i]);
            auto hi = std::upper_bound(sorted.begin(), sorted.end(), s.ca[i]);
            freq_of[i] = static_cast<int>(hi - lo);
        }
    }
    std::sort(s.order.begin(), s.order.end(), [&](int x, int y) {
        return std::tuple(freq_of[x], -static_cast<int>(a.neighbors(x).size()), x) <
               std::tuple(freq_of[y], -static_cast<int>(a.neighbors(y).size()), y);
    });
    return s.extend(0);
}

}  // namespace grex
