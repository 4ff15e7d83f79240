#pragma once

#include "grex/graph.hpp"

namespace grex {

// Exact planarity decision via the left-right criterion over a DFS
// orientation (Brandes' formulation of the de Fraysseix-Rosenstiehl test).
bool is_planar(const Graph& g);

}  // namespace grex
