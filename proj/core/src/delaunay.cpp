#include "grex/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace grex {
namespace {

struct Tri {
    int a, b, c;
    bool alive = true;
};

double orient2d(double ax, double ay, double bx, double by, double cx, double cy) {
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
}

// > 0 when d lies inside the circumcircle of counterclockwise (a, b, c)
double incircle(double ax, double ay, double bx, double by, double cx, double cy, double dx,
                double dy) {
    const double adx = ax - dx, ady = ay - dy;
    const double bdx = bx - dx, bdy = by - dy;
    const double cdx = cx - dx, cdy = cy - dy;
    const double ad = adx * adx + ady * ady;
    const double bd = bdx * bdx + bdy * bdy;
    const double cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
           ad * (bdx * cdy - bdy * cdx);
}

}  // namespace

std::optional<Graph> delaunay_triangulation(const std::vector<std::pair<double, double>>& pts) {
    const int n = static_cast<int>(pts.size());
    if (n < 3) return std::nullopt;

    std::vector<std::pair<double, double>> p = pts;
    // super-triangle enclosing the unit square with generous margin
    p.push_back({-100.0, -100.0});
    p.push_back({100.0, -100.0});
    p.push_back({0.0, 100.0});
    const int s0 = n, s1 = n + 1, s2 = n + 2;

    std::vector<Tri> tris;
    tris.push_back({s0, s1, s2});

    const double degenerate_tol = 1e-12;
    for (int v = 0; v < n; ++v) {
        const auto [px, py] = p[v];
        std::vector<int> bad;
        for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
            if (!tris[t].alive) continue;
            const Tri& tr = tris[t];
            const double det = incircle(p[tr.a].first, p[tr.a].second, p[tr.b].first,
                                        p[tr.b].second, p[tr.c].first, p[tr.c].second, px, py);
            if (std::abs(det) < degenerate_tol) return std::nullopt;  // cocircular
            if (det > 0.0) bad.push_back(t);
        }
        if (bad.empty()) return std::nullopt;  // point outside all circumcircles

        // cavity boundary: edges of bad triangles not shared by two of them
        std::map<std::pair<int, int>, int> edge_count;
        auto note = [&](int a, int b) {
            if (a > b) std::swap(a, b);
            ++edge_count[{a, b}];
        };
        for (int t : bad) {
            note(tris[t].a, tris[t].b);
            note(tris[t].b, tris[t].c);
            note(tris[t].c, tris[t].a);
            tris[t].alive = false;
        }
        for (const auto& [edge, count] : edge_count) {
            if (count != 1) continue;
            auto [a, b] = edge;
            const double o = orient2d(p[a].first, p[a].second, p[b].first, p[b].second, px, py);
            if (std::abs(o) < degenerate_tol) return std::nullopt;  // collinear
            if (o > 0.0)
                tris.push_back({a, b, v});
            else
                tris.push_back({b, a, v});
        }
    }

    std::vector<std::pair<int, int>> edges;
    for (const Tri& tr : tris) {
        if (!tr.alive) continue;
        if (tr.a >= n || tr.b >= n || tr.c >= n) continue;  // touches the super-triangle
        edges.emplace_back(tr.a, tr.b);
        edges.emplace_back(tr.b, tr.c);
        edges.emplace_back(tr.c, tr.a);
    }
    for (auto& [a, b] : edges)
        if (a > b) std::swap(a, b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    Graph g = Graph::from_pairs(n, edges);
    if (!is_connected(g)) return std::nullopt;
    if (n >= 3 && g.num_edges() > 3 * n - 6) return std::nullopt;
    return g;
}

}  // namespace grex
