#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "grex/graph.hpp"

namespace grex {

// Delaunay triangulation of points in general position via incremental
// Bowyer-Watson insertion. Returns the edge set as a graph, or nullopt when a
// near-degenerate configuration (collinear/cocircular within tolerance) is
// detected; callers resample the points.
std::optional<Graph> delaunay_triangulation(const std::vector<std::pair<double, double>>& points);

}  // namespace grex
