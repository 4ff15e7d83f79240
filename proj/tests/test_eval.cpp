#include <doctest.h>

#include <cmath>

#include "grex/eval.hpp"
#include "support/oracles.hpp"

using namespace grex;

TEST_CASE("mmd of identical sets is zero, symmetric, psd kernel") {
    Rng rng(1);
    std::vector<std::vector<double>> set_a, set_b;
    for (int i = 0; i < 6; ++i) {
        std::vector<double> h(10);
        double total = 0.0;
        for (double& x : h) total += (x = rng.uniform());
        for (double& x : h) x /= total;
        (i % 2 ? set_a : set_b).push_back(h);
    }
    CHECK(std::abs(mmd(set_a, set_a)) < 1e-12);
    CHECK(mmd(set_a, set_b) == doctest::Approx(mmd(set_b, set_a)).epsilon(1e-14));
    CHECK(mmd(set_a, set_b) >= 0.0);
    CHECK_THROWS(mmd({}, set_b));

    // kernel Gram matrix over all histograms is positive semidefinite
    std::vector<std::vector<double>> all = set_a;
    all.insert(all.end(), set_b.begin(), set_b.end());
    const int n = static_cast<int>(all.size());
    Eigen::MatrixXd gram(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double tv = total_variation(all[i], all[j]);
            gram(i, j) = std::exp(-tv * tv / 2.0);
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("mmd of singleton sets matches the direct kernel sum") {
    // {P3} vs {K3} on the degree statistic: tv distance works out by hand
    std::vector<Graph> a{oracles::path_graph(3)};
    std::vector<Graph> b{oracles::complete_graph(3)};
    // degrees: P3 -> [0, 2/3, 1/3], K3 -> [0, 0, 1]; tv = 2/3
    const double tv = 2.0 / 3.0;
    const double want = 2.0 - 2.0 * std::exp(-tv * tv / 2.0);
    CHECK(mmd_statistic(a, b, GraphStatistic::Degree) == doctest::Approx(want).epsilon(1e-12));
    CHECK(mmd_statistic(a, a, GraphStatistic::Degree) == doctest::Approx(0.0));
}

TEST_CASE("statistic histograms") {
    Graph k4 = oracles::complete_graph(4);
    auto deg = degree_histogram(k4, 5);
    CHECK(deg[3] == doctest::Approx(1.0));
    auto clus = clustering_histogram(k4);
    CHECK(clus[99] == doctest::Approx(1.0));  // all coefficients are 1
    auto clus_tree = clustering_histogram(oracles::star_graph(5));
    CHECK(clus_tree[0] == doctest::Approx(1.0));
    auto spec = spectral_histogram(k4);
    double total = 0.0;
    for (double x : spec) total += x;
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("planarity: known graphs") {
    CHECK(is_planar(oracles::complete_graph(4)));
    CHECK_FALSE(is_planar(oracles::complete_graph(5)));
    CHECK_FALSE(is_planar(oracles::complete_bipartite(3, 3)));
    CHECK(is_planar(oracles::complete_bipartite(2, 3)));
    CHECK(is_planar(oracles::cycle_graph(8)));
    Rng rng(1);
    CHECK(is_planar(oracles::random_connected_graph(20, 0.0, rng)));
}

TEST_CASE("planarity agrees with the Kuratowski-minor oracle") {
    Rng rng(3);
    int nonplanar_seen = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 5 + static_cast<int>(rng.uniform_int(4));
        const double p = 0.2 + 0.6 * rng.uniform();
        Graph g = oracles::random_graph(n, p, rng);
        const bool want = oracles::planar_by_minor_search(g);
        if (!want) ++nonplanar_seen;
        CHECK(is_planar(g) == want);
    }
    CHECK(nonplanar_seen > 20);  // the sample exercises both outcomes
}

TEST_CASE("tree validity") {
    CHECK(is_valid_tree(oracles::path_graph(4)));
    CHECK_FALSE(is_valid_tree(oracles::cycle_graph(4)));
    // forest: right edge count minus one, disconnected
    Graph forest(4, {{0, 1, 1.0}, {2, 3, 1.0}});
    CHECK_FALSE(is_valid_tree(forest));
    CHECK(is_valid_tree(Graph::singleton()));
}

TEST_CASE("vun accounting") {
    Rng rng(5);
    Graph tree = oracles::random_connected_graph(7, 0.0, rng);
    std::vector<Graph> train{tree};

    // two copies of a training graph: 50% unique, 0% novel
    auto perm = oracles::random_permutation(7, rng);
    VunReport r = vun({tree, oracles::permute_graph(tree, perm)}, train,
                      [](const Graph&) { return true; });
    CHECK(r.unique_pct == doctest::Approx(50.0));
    CHECK(r.novel_pct == doctest::Approx(0.0));
    CHECK(r.vun_pct == doctest::Approx(0.0));

    // distinct valid non-training trees: everything 100%
    std::vector<Graph> fresh{oracles::path_graph(5), oracles::star_graph(5),
                             oracles::path_graph(6)};
    r = vun(fresh, train, [](const Graph& g) { return is_valid_tree(g); });
    CHECK(r.valid_pct == 100.0);
    CHECK(r.unique_pct == 100.0);
    CHECK(r.novel_pct == 100.0);
    CHECK(r.vun_pct == 100.0);

    // ordering invariance
    std::vector<Graph> shuffled{fresh[2], fresh[0], fresh[1]};
    VunReport r2 = vun(shuffled, train, [](const Graph& g) { return is_valid_tree(g); });
    CHECK(r2.vun_pct == r.vun_pct);
    CHECK(r2.unique_pct == r.unique_pct);
}

TEST_CASE("evaluate_samples excludes degenerate references from the ratio") {
    Rng rng(7);
    std::vector<Graph> trees_a, trees_b, trees_c;
    for (int i = 0; i < 6; ++i) {
        trees_a.push_back(oracles::random_connected_graph(12, 0.0, rng));
        trees_b.push_back(oracles::random_connected_graph(12, 0.0, rng));
        trees_c.push_back(oracles::random_connected_graph(12, 0.0, rng));
    }
    MetricReport report = evaluate_samples(trees_a, trees_b, trees_c,
                                           [](const Graph& g) { return is_valid_tree(g); });
    // trees have identically-zero clustering histograms on both sides
    CHECK(report.mmd_train.at("clustering") == doctest::Approx(0.0));
    for (const std::string& name : report.ratio_statistics) CHECK(name != "clustering");
    CHECK(report.vun.valid_pct == 100.0);
    CHECK(!format_report(report).empty());
}

TEST_CASE("log-log slope fitting") {
    std::vector<ScalingPoint> cubic;
    for (int n : {16, 32, 64, 128})
        cubic.push_back({n, 1e-6 * n * n * n});
    CHECK(fitted_loglog_slope(cubic) == doctest::Approx(3.0).epsilon(1e-9));

    std::vector<ScalingPoint> linear;
    for (int n : {16, 32, 64, 128})
        linear.push_back({n, 1e-6 * n});
    CHECK(fitted_loglog_slope(linear) == doctest::Approx(1.0).epsilon(1e-9));

    // constant-time control: slope about zero
    ScalingReport flat = scaling_benchmark([](int) {}, {16, 32, 64}, 2);
    CHECK(std::abs(flat.slope) < 1.0);
}
