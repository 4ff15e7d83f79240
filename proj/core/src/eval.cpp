#include "grex/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "grex/spectra.hpp"
#include "grex/wl.hpp"

namespace grex {

std::string statistic_name(GraphStatistic s) {
    switch (s) {
        case GraphStatistic::Degree: return "degree";
        case GraphStatistic::Clustering: return "clustering";
        case GraphStatistic::Spectral: return "spectral";
    }
    return "unknown";
}

namespace {

void normalize(std::vector<double>& h) {
    double total = 0.0;
    for (double x : h) total += x;
    if (total > 0.0)
        for (double& x : h) x /= total;
}

}  // namespace

std::vector<double> degree_histogram(const Graph& g, int max_degree) {
    std::vector<double> h(max_degree + 1, 0.0);
    for (int v = 0; v < g.num_nodes(); ++v) {
        const int d = std::min<int>(static_cast<int>(g.neighbors(v).size()), max_degree);
        h[d] += 1.0;
    }
    normalize(h);
    return h;
}

std::vector<double> clustering_histogram(const Graph& g, int bins) {
    std::vector<double> h(bins, 0.0);
    for (int v = 0; v < g.num_nodes(); ++v) {
        const auto& nb = g.neighbors(v);
        const int d = static_cast<int>(nb.size());
        double coeff = 0.0;
        if (d >= 2) {
            int links = 0;
            for (int i = 0; i < d; ++i)
                for (int j = i + 1; j < d; ++j)
                    if (g.has_edge(nb[i], nb[j])) ++links;
            coeff = 2.0 * links / (static_cast<double>(d) * (d - 1));
        }
        int bin = std::min(static_cast<int>(coeff * bins), bins - 1);
        h[bin] += 1.0;
    }
    normalize(h);
    return h;
}

std::vector<double> spectral_histogram(const Graph& g, int bins) {
    const int n = g.num_nodes();
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd deg = Eigen::VectorXd::Zero(n);
    for (const Edge& e : g.edges()) {
        deg[e.u] += e.w;
        deg[e.v] += e.w;
    }
    Eigen::VectorXd inv_sqrt(n);
    for (int i = 0; i < n; ++i) inv_sqrt[i] = deg[i] > 0.0 ? 1.0 / std::sqrt(deg[i]) : 0.0;
    for (const Edge& e : g.edges()) {
        const double w = -e.w * inv_sqrt[e.u] * inv_sqrt[e.v];
        lap(e.u, e.v) = w;
        lap(e.v, e.u) = w;
    }
    for (int i = 0; i < n; ++i) lap(i, i) = deg[i] > 0.0 ? 1.0 : 0.0;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap, Eigen::EigenvaluesOnly);
    std::vector<double> h(bins, 0.0);
    for (int i = 0; i < n; ++i) {
        const double lam = std::clamp(es.eigenvalues()[i], 0.0, 2.0);
        int bin = std::min(static_cast<int>(lam / 2.0 * bins), bins - 1);
        h[bin] += 1.0;
    }
    normalize(h);
    return h;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t len = std::max(a.size(), b.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        const double x = i < a.size() ? a[i] : 0.0;
        const double y = i < b.size() ? b[i] : 0.0;
        sum += std::abs(x - y);
    }
    return 0.5 * sum;
}

double mmd(const std::vector<std::vector<double>>& set_a,
           const std::vector<std::vector<double>>& set_b, double bandwidth) {
    if (set_a.empty() || set_b.empty()) throw std::invalid_argument("mmd: empty sample set");
    auto kernel = [&](const std::vector<double>& x, const std::vector<double>& y) {
        const double tv = total_variation(x, y);
        return std::exp(-tv * tv / (2.0 * bandwidth * bandwidth));
    };
    double kaa = 0.0, kbb = 0.0, kab = 0.0;
    for (const auto& x : set_a)
        for (const auto& y : set_a) kaa += kernel(x, y);
    for (const auto& x : set_b)
        for (const auto& y : set_b) kbb += kernel(x, y);
    for (const auto& x : set_a)
        for (const auto& y : set_b) kab += kernel(x, y);
    const double na = static_cast<double>(set_a.size());
    const double nb = static_cast<double>(set_b.size());
    return kaa / (na * na) + kbb / (nb * nb) - 2.0 * kab / (na * nb);
}

double mmd_statistic(const std::vector<Graph>& a, const std::vector<Graph>& b,
                     GraphStatistic stat, double bandwidth) {
    std::vector<std::vector<double>> ha, hb;
    if (stat == GraphStatistic::Degree) {
        int max_degree = 1;
        for (const auto* set : {&a, &b})
            for (const Graph& g : *set)
                for (int v = 0; v < g.num_nodes(); ++v)
                    max_degree = std::max(max_degree, static_cast<int>(g.neighbors(v).size()));
        for (const Graph& g : a) ha.push_back(degree_histogram(g, max_degree));
        for (const Graph& g : b) hb.push_back(degree_histogram(g, max_degree));
    } else if (stat == GraphStatistic::Clustering) {
        for (const Graph& g : a) ha.push_back(clustering_histogram(g));
        for (const Graph& g : b) hb.push_back(clustering_histogram(g));
    } else {
        for (const Graph& g : a) ha.push_back(spectral_histogram(g));
        for (const Graph& g : b) hb.push_back(spectral_histogram(g));
    }
    return mmd(ha, hb, bandwidth);
}

bool is_valid_tree(const Graph& g) {
    return g.num_edges() == g.num_nodes() - 1 && is_connected(g);
}

namespace {

// Isomorphism classes via WL digest buckets with exact confirmation.
std::vector<int> iso_class_of(const std::vector<Graph>& graphs) {
    std::vector<int> cls(graphs.size(), -1);
    std::vector<std::uint64_t> digest(graphs.size());
    for (std::size_t i = 0; i < graphs.size(); ++i) digest[i] = wl_hash(graphs[i]);
    int next = 0;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        if (cls[i] >= 0) continue;
        cls[i] = next;
        for (std::size_t j = i + 1; j < graphs.size(); ++j) {
            if (cls[j] >= 0 || digest[j] != digest[i]) continue;
            if (is_isomorphic(graphs[i], graphs[j])) cls[j] = next;
        }
        ++next;
    }
    return cls;
}

}  // namespace

VunReport vun(const std::vector<Graph>& generated, const std::vector<Graph>& train_set,
              const std::function<bool(const Graph&)>& validity) {
    VunReport report;
    if (generated.empty()) return report;
    const double total = static_cast<double>(generated.size());

    std::vector<std::uint64_t> train_digest(train_set.size());
    for (std::size_t i = 0; i < train_set.size(); ++i) train_digest[i] = wl_hash(train_set[i]);

    const std::vector<int> cls = iso_class_of(generated);
    std::vector<char> first_of_class(generated.size(), 0);
    {
        std::vector<char> seen(generated.size(), 0);
        for (std::size_t i = 0; i < generated.size(); ++i) {
            if (!seen[cls[i]]) {
                seen[cls[i]] = 1;
                first_of_class[i] = 1;
            }
        }
    }
    int valid = 0, unique = 0, novel = 0, all_three = 0;
    for (std::size_t i = 0; i < generated.size(); ++i) {
        const bool is_valid = !validity || validity(generated[i]);
        bool is_novel = true;
        const std::uint64_t d = wl_hash(generated[i]);
        for (std::size_t j = 0; j < train_set.size(); ++j) {
            if (train_digest[j] == d && is_isomorphic(generated[i], train_set[j])) {
                is_novel = false;
                break;
            }
        }
        const bool is_unique = first_of_class[i];
        if (is_valid) ++valid;
        if (is_unique) ++unique;
        if (is_novel) ++novel;
        if (is_valid && is_unique && is_novel) ++all_three;
    }
    report.valid_pct = 100.0 * valid / total;
    report.unique_pct = 100.0 * unique / total;
    report.novel_pct = 100.0 * novel / total;
    report.vun_pct = 100.0 * all_three / total;
    return report;
}

MetricReport evaluate_samples(const std::vector<Graph>& generated,
                              const std::vector<Graph>& train_set,
                              const std::vector<Graph>& test_set,
                              const std::function<bool(const Graph&)>& validity,
                              double bandwidth) {
    MetricReport report;
    double ratio_sum = 0.0;
    for (GraphStatistic stat :
         {GraphStatistic::Degree, GraphStatistic::Clustering, GraphStatistic::Spectral}) {
        const std::string name = statistic_name(stat);
        const double gen = mmd_statistic(generated, test_set, stat, bandwidth);
        const double ref = mmd_statistic(train_set, test_set, stat, bandwidth);
        report.mmd_generated[name] = gen;
        report.mmd_train[name] = ref;
        if (ref > 1e-12) {  // degenerate references are excluded from the ratio
            report.ratio_statistics.push_back(name);
            ratio_sum += gen / ref;
        }
    }
    report.mean_ratio = report.ratio_statistics.empty()
                            ? 0.0
                            : ratio_sum / static_cast<double>(report.ratio_statistics.size());
    report.vun = vun(generated, train_set, validity);
    return report;
}

std::string format_report(const MetricReport& report) {
    std::ostringstream os;
    os << "statistic    mmd(gen,test)  mmd(train,test)\n";
    for (const auto& [name, value] : report.mmd_generated) {
        os << name;
        for (std::size_t i = name.size(); i < 13; ++i) os << ' ';
        os << value << "  " << report.mmd_train.at(name) << '\n';
    }
    os << "mean ratio (" << report.ratio_statistics.size() << " stats): " << report.mean_ratio
       << '\n';
    os << "valid " << report.vun.valid_pct << "%  unique " << report.vun.unique_pct
       << "%  novel " << report.vun.novel_pct << "%  V.U.N. " << report.vun.vun_pct << "%\n";
    return os.str();
}

double fitted_loglog_slope(const std::vector<ScalingPoint>& points) {
    if (points.size() < 2) throw std::invalid_argument("fitted_loglog_slope: need >= 2 points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(points.size());
    for (const ScalingPoint& p : points) {
        const double x = std::log(static_cast<double>(p.size));
        const double y = std::log(std::max(p.seconds, 1e-12));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ScalingReport scaling_benchmark(const std::function<void(int)>& run,
                                const std::vector<int>& sizes, int repeats) {
    ScalingReport report;
    for (int size : sizes) {
        double total = 0.0;
        for (int r = 0; r < repeats; ++r) {
            const auto start = std::chrono::steady_clock::now();
            run(size);
            const auto stop = std::chrono::steady_clock::now();
            total += std::chrono::duration<double>(stop - start).count();
        }
        report.points.push_back({size, total / std::max(repeats, 1)});
    }
    report.slope = fitted_loglog_slope(report.points);
    return report;
}

}  // namespace grex
