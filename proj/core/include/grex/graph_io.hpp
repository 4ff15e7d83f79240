#pragma once

#include <filesystem>
#include <string>

#include "grex/graph.hpp"

namespace grex {

// Line-oriented text format: header "n m", then one "i j w" line per edge,
// 1-indexed. Weights are printed with 17 significant digits so that
// read(write(g)) reproduces every double bit-exactly.
std::string to_text(const Graph& g);
Graph from_text(const std::string& text);

// JSON variant embedding the optional node/edge feature channels.
std::string to_json(const Graph& g);
Graph from_json(const std::string& text);

void save_graph(const Graph& g, const std::filesystem::path& path);
Graph load_graph(const std::filesystem::path& path);  // dispatches on extension (.json)

}  // namespace grex
