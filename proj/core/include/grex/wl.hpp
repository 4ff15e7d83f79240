#pragma once

#include <cstdint>

#include "grex/graph.hpp"

namespace grex {

// Weisfeiler-Lehman color-refinement digest, invariant under node relabeling.
// Equal digests do not certify isomorphism; callers follow up with
// is_isomorphic on collision.
std::uint64_t wl_hash(const Graph& g, int rounds = 3);

// Exact isomorphism by backtracking with WL-color and degree pruning.
// Ignores weights and features (structural isomorphism).
bool is_isomorphic(const Graph& a, const Graph& b);

}  // namespace grex
