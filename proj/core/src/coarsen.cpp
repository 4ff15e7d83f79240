#include "grex/coarsen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "grex/spectra.hpp"

namespace grex {
namespace {

bool induces_connected(const Graph& g, const std::vector<int>& cluster) {
    if (cluster.size() <= 1) return true;
    std::vector<char> in(g.num_nodes(), 0);
    for (int v : cluster) in[v] = 1;
    std::vector<int> stack{cluster[0]};
    std::vector<char> seen(g.num_nodes(), 0);
    seen[cluster[0]] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : g.neighbors(u)) {
            if (in[v] && !seen[v]) {
                seen[v] = 1;
                ++reached;
                stack.push_back(v);
            }
        }
    }
    return reached == cluster.size();
}

}  // namespace

void validate_partition(const Graph& g, const Partition& p) {
    std::vector<int> owner(g.num_nodes(), -1);
    for (std::size_t c = 0; c < p.size(); ++c) {
        if (p[c].empty()) throw std::invalid_argument("partition: empty cluster");
        for (int v : p[c]) {
            if (v < 0 || v >= g.num_nodes())
                throw std::invalid_argument("partition: node out of range");
            if (owner[v] != -1) throw std::invalid_argument("partition: clusters overlap");
            owner[v] = static_cast<int>(c);
        }
        if (!induces_connected(g, p[c]))
            throw std::invalid_argument("partition: cluster induces a disconnected subgraph");
    }
    for (int v = 0; v < g.num_nodes(); ++v)
        if (owner[v] == -1) throw std::invalid_argument("partition: node not covered");
}

Partition complete_partition(const Graph& g, const Partition& fragment) {
    Partition full = fragment;
    std::vector<char> covered(g.num_nodes(), 0);
    for (auto& c : full) {
        std::sort(c.begin(), c.end());
        for (int v : c) covered[v] = 1;
    }
    for (int v = 0; v < g.num_nodes(); ++v)
        if (!covered[v]) full.push_back({v});
    std::sort(full.begin(), full.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) { return a[0] < b[0]; });
    return full;
}

std::pair<Eigen::SparseMatrix<double>, Eigen::SparseMatrix<double>>
projection_pair(const Partition& p, int n) {
    const int nc = static_cast<int>(p.size());
    std::vector<Eigen::Triplet<double>> tp, tl;
    for (int c = 0; c < nc; ++c) {
        const double inv = 1.0 / static_cast<double>(p[c].size());
        for (int v : p[c]) {
            tp.emplace_back(c, v, inv);
            tl.emplace_back(v, c, 1.0);
        }
    }
    Eigen::SparseMatrix<double> proj(nc, n), lift(n, nc);
    proj.setFromTriplets(tp.begin(), tp.end());
    lift.setFromTriplets(tl.begin(), tl.end());
    return {std::move(proj), std::move(lift)};
}

CoarseningStep contract(const Graph& g, const Partition& p) {
    validate_partition(g, p);
    const int nc = static_cast<int>(p.size());
    std::vector<int> owner(g.num_nodes());
    for (int c = 0; c < nc; ++c)
        for (int v : p[c]) owner[v] = c;

    std::map<std::pair<int, int>, double> acc;
    for (const Edge& e : g.edges()) {
        int a = owner[e.u], b = owner[e.v];
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        acc[{a, b}] += e.w;
    }
    std::vector<Edge> edges;
    edges.reserve(acc.size());
    for (const auto& [key, w] : acc) edges.push_back({key.first, key.second, w});

    CoarseningStep step;
    step.parent = g;
    step.child = Graph(nc, std::move(edges));
    step.partition = p;
    std::tie(step.proj, step.lift) = projection_pair(p, g.num_nodes());
    return step;
}

double local_variation_cost(const Graph& level, const Eigen::MatrixXd& a_mat,
                            const std::vector<int>& candidate) {
    const int c = static_cast<int>(candidate.size());
    if (c < 2) throw std::invalid_argument("local_variation_cost: candidate must have >= 2 nodes");
    if (a_mat.cols() == 0) return 0.0;

    // Pi_perp annihilates everything outside the candidate, so only the
    // candidate block of the boundary-doubled Laplacian enters the seminorm.
    std::vector<int> pos(level.num_nodes(), -1);
    for (int i = 0; i < c; ++i) pos[candidate[i]] = i;

    Eigen::MatrixXd y(c, a_mat.cols());
    for (int i = 0; i < c; ++i) y.row(i) = a_mat.row(candidate[i]);
    Eigen::RowVectorXd mean = y.colwise().mean();
    y.rowwise() -= mean;

    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(c, c);
    for (int i = 0; i < c; ++i) {
        const int u = candidate[i];
        double diag = 0.0;
        const auto& nb = level.neighbors(u);
        const auto& ei = level.incident_edges(u);
        for (std::size_t t = 0; t < nb.size(); ++t) {
            const double w = level.edge(ei[t]).w;
            const int j = pos[nb[t]];
            if (j >= 0) {
                diag += w;
                block(i, j) -= w;
            } else {
                diag += 2.0 * w;  // boundary edges count twice
            }
        }
        block(i, i) += diag;
    }
    double cost = (y.transpose() * block * y).trace() / static_cast<double>(c - 1);
    return std::max(cost, 0.0);
}

std::vector<std::vector<int>> contraction_family(const Graph& g, ContractionKind kind) {
    std::vector<std::vector<int>> out;
    if (kind == ContractionKind::Edge) {
        out.reserve(g.num_edges());
        for (const Edge& e : g.edges()) out.push_back({e.u, e.v});
    } else {
        out.reserve(g.num_nodes());
        for (int i = 0; i < g.num_nodes(); ++i) {
            std::vector<int> set = g.neighbors(i);
            set.push_back(i);
            std::sort(set.begin(), set.end());
            out.push_back(std::move(set));
        }
    }
    return out;
}

std::vector<std::vector<int>> rnd_greedy_min_cost_part(
    const std::vector<std::vector<int>>& candidates, const std::vector<double>& costs,
    int m, double lambda, Rng& rng) {
    if (candidates.size() != costs.size())
        throw std::invalid_argument("rnd_greedy_min_cost_part: size mismatch");
    const int n = static_cast<int>(candidates.size());
    std::vector<char> alive(n, 1);
    int alive_count = n;
    std::vector<std::vector<int>> chosen;
    long long reduction = 0;

    auto intersects = [&](const std::vector<int>& a, const std::vector<int>& b) {
        std::size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i] < b[j]) ++i;
            else if (a[i] > b[j]) ++j;
            else return true;
        }
        return false;
    };

    while (reduction < m && alive_count > 0) {
        int pick = -1;
        while (true) {
            int best = -1;
            for (int i = 0; i < n; ++i)
                if (alive[i] && (best < 0 || costs[i] < costs[best])) best = i;
            alive[best] = 0;
            --alive_count;
            pick = best;
            bool b = rng.bernoulli(lambda);
            if (!b || alive_count == 0) break;
        }
        chosen.push_back(candidates[pick]);
        reduction += static_cast<long long>(candidates[pick].size()) - 1;
        for (int i = 0; i < n; ++i) {
            if (alive[i] && intersects(candidates[i], candidates[pick])) {
                alive[i] = 0;
                --alive_count;
            }
        }
    }
    return chosen;
}

CoarseningSequence rnd_red_seq(const Graph& g, const CoarsenConfig& cfg, Rng& rng) {
    if (!is_connected(g)) throw std::invalid_argument("rnd_red_seq: input must be connected");
    if (!(cfg.rho_min > 0.0 && cfg.rho_max < 1.0 && cfg.rho_min <= cfg.rho_max))
        throw std::invalid_argument("rnd_red_seq: rho range must lie in (0,1)");

    CoarseningSequence seq;
    seq.preserved_eigs = cfg.preserved_eigs;
    seq.levels.push_back(g);

    const int k_eff = std::min(cfg.preserved_eigs, std::max(g.num_nodes() - 1, 0));
    Eigen::MatrixXd a_mat(g.num_nodes(), k_eff);
    if (k_eff > 0) {
        EigPairs eig = smallest_nonzero_eigenpairs(g, k_eff);
        for (int i = 0; i < k_eff; ++i) {
            const double lam = eig.values[i];
            a_mat.col(i) = lam > cfg.eig_clamp ? (eig.vectors.col(i) / std::sqrt(lam)).eval()
                                               : Eigen::VectorXd::Zero(g.num_nodes());
        }
    }
    seq.a_mats.push_back(a_mat);
    Eigen::MatrixXd b_mat = a_mat;

    while (seq.levels.back().num_nodes() > 1) {
        const Graph& cur = seq.levels.back();
        const double rho = cur.num_nodes() < cfg.small_level
                               ? cfg.rho_max
                               : rng.uniform(cfg.rho_min, cfg.rho_max);
        const int m = static_cast<int>(std::ceil(rho * cur.num_nodes()));

        auto candidates = contraction_family(cur, cfg.family);
        std::vector<double> costs(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i)
            costs[i] = local_variation_cost(cur, a_mat, candidates[i]);

        auto fragment = rnd_greedy_min_cost_part(candidates, costs, m, cfg.lambda, rng);
        double sigma_sq = 0.0;
        for (const auto& set : fragment)
            sigma_sq += local_variation_cost(cur, a_mat, set) * (static_cast<double>(set.size()) - 1.0);

        Partition partition = complete_partition(cur, fragment);
        CoarseningStep step = contract(cur, partition);
        if (step.child.num_nodes() == cur.num_nodes())
            throw std::runtime_error("rnd_red_seq: no reduction possible");

        b_mat = step.proj * b_mat;
        const Graph& child = step.child;
        if (b_mat.cols() > 0) {
            Eigen::MatrixXd lb = laplacian_dense(child) * b_mat;
            a_mat = b_mat * pinv_sqrt(b_mat.transpose() * lb, cfg.eig_clamp);
        } else {
            a_mat = Eigen::MatrixXd(child.num_nodes(), 0);
        }

        seq.sigmas.push_back(std::sqrt(sigma_sq));
        seq.a_mats.push_back(a_mat);
        seq.levels.push_back(child);
        seq.steps.push_back(std::move(step));
    }
    return seq;
}

double spectral_error_bound(const CoarseningSequence& seq, int steps) {
    const int count = steps < 0 ? static_cast<int>(seq.sigmas.size())
                                : std::min<int>(steps, static_cast<int>(seq.sigmas.size()));
    double prod = 1.0;
    for (int i = 0; i < count; ++i) prod *= 1.0 + seq.sigmas[i];
    return prod - 1.0;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd>
composed_projection(const CoarseningSequence& seq, int level) {
    if (level < 0 || level >= static_cast<int>(seq.levels.size()))
        throw std::out_of_range("composed_projection: bad level");
    const int n = seq.levels[0].num_nodes();
    Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd lift = Eigen::MatrixXd::Identity(n, n);
    for (int l = 0; l < level; ++l) {
        proj = seq.steps[l].proj * proj;
        lift = lift * seq.steps[l].lift;
    }
    return {std::move(proj), std::move(lift)};
}

}  // namespace grex
