#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "grex/graph.hpp"
#include "grex/planarity.hpp"

namespace grex {

enum class GraphStatistic { Degree, Clustering, Spectral };

std::string statistic_name(GraphStatistic s);

// Normalized per-graph histograms. Degree bins span 0..max_degree;
// clustering coefficients use 100 bins on [0,1]; the spectral statistic is a
// 200-bin histogram of normalized-Laplacian eigenvalues on [0,2].
std::vector<double> degree_histogram(const Graph& g, int max_degree);
std::vector<double> clustering_histogram(const Graph& g, int bins = 100);
std::vector<double> spectral_histogram(const Graph& g, int bins = 200);

double total_variation(const std::vector<double>& a, const std::vector<double>& b);

// Squared maximum mean discrepancy with a Gaussian kernel over the total
// variation distance, k(x,y) = exp(-tv(x,y)^2 / (2 bw^2)); V-statistic form,
// so identical sets score exactly zero.
double mmd(const std::vector<std::vector<double>>& set_a,
           const std::vector<std::vector<double>>& set_b, double bandwidth = 1.0);

double mmd_statistic(const std::vector<Graph>& a, const std::vector<Graph>& b,
                     GraphStatistic stat, double bandwidth = 1.0);

bool is_valid_tree(const Graph& g);

struct VunReport {
    double valid_pct = 0.0;
    double unique_pct = 0.0;
    double novel_pct = 0.0;
    double vun_pct = 0.0;  // simultaneously valid, unique and novel
};

VunReport vun(const std::vector<Graph>& generated, const std::vector<Graph>& train_set,
              const std::function<bool(const Graph&)>& validity);

struct MetricReport {
    std::map<std::string, double> mmd_generated;  // statistic -> MMD vs test set
    std::map<std::string, double> mmd_train;      // statistic -> train-set reference
    std::vector<std::string> ratio_statistics;    // statistics entering the mean ratio
    double mean_ratio = 0.0;
    VunReport vun;
};

MetricReport evaluate_samples(const std::vector<Graph>& generated,
                              const std::vector<Graph>& train_set,
                              const std::vector<Graph>& test_set,
                              const std::function<bool(const Graph&)>& validity,
                              double bandwidth = 1.0);

std::string format_report(const MetricReport& report);

struct ScalingPoint {
    int size = 0;
    double seconds = 0.0;
};

struct ScalingReport {
    std::vector<ScalingPoint> points;
    double slope = 0.0;  // least-squares slope of log(time) vs log(size)
};

double fitted_loglog_slope(const std::vector<ScalingPoint>& points);

// Times run(size) `repeats` times per size (mean wall time).
ScalingReport scaling_benchmark(const std::function<void(int)>& run,
                                const std::vector<int>& sizes, int repeats);

}  // namespace grex
