#include "grex/graph_io.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace grex {
namespace {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

double parse_double(const std::string& s) {
    return std::strtod(s.c_str(), nullptr);
}

}  // namespace

std::string to_text(const Graph& g) {
    std::ostringstream os;
    os << g.num_nodes() << ' ' << g.num_edges() << '\n';
    for (const Edge& e : g.edges())
        os << e.u + 1 << ' ' << e.v + 1 << ' ' << format_double(e.w) << '\n';
    return os.str();
}

Graph from_text(const std::string& text) {
    std::istringstream is(text);
    int n = 0, m = 0;
    if (!(is >> n >> m)) throw std::runtime_error("graph text: bad header");
    std::vector<Edge> edges;
    edges.reserve(m);
    for (int i = 0; i < m; ++i) {
        int u, v;
        std::string w;
        if (!(is >> u >> v >> w)) throw std::runtime_error("graph text: truncated edge list");
        edges.push_back({u - 1, v - 1, parse_double(w)});
    }
    return Graph(n, std::move(edges));
}

std::string to_json(const Graph& g) {
    nlohmann::ordered_json j;
    j["n"] = g.num_nodes();
    auto edges = nlohmann::ordered_json::array();
    auto weights = nlohmann::ordered_json::array();
    for (const Edge& e : g.edges()) {
        edges.push_back({e.u + 1, e.v + 1});
        weights.push_back(e.w);
    }
    j["edges"] = std::move(edges);
    j["weights"] = std::move(weights);
    if (g.has_node_features()) j["node_feat"] = g.node_features();
    if (g.has_edge_features()) j["edge_feat"] = g.edge_features();
    return j.dump(2) + "\n";
}

Graph from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    int n = j.at("n").get<int>();
    std::vector<Edge> edges;
    const auto& je = j.at("edges");
    const auto& jw = j.at("weights");
    if (je.size() != jw.size()) throw std::runtime_error("graph json: edges/weights mismatch");
    edges.reserve(je.size());
    for (std::size_t i = 0; i < je.size(); ++i)
        edges.push_back({je[i][0].get<int>() - 1, je[i][1].get<int>() - 1, jw[i].get<double>()});
    std::vector<double> nf, ef;
    if (j.contains("node_feat")) nf = j["node_feat"].get<std::vector<double>>();
    if (j.contains("edge_feat")) ef = j["edge_feat"].get<std::vector<double>>();
    return Graph(n, std::move(edges), std::move(nf), std::move(ef));
}

void save_graph(const Graph& g, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path.string());
    os << (path.extension() == ".json" ? to_json(g) : to_text(g));
}

Graph load_graph(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return path.extension() == ".json" ? from_json(ss.str()) : from_text(ss.str());
}

}  // namespace grex
