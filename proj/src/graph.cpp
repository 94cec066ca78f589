#include "contagion/graph.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "contagion/errors.hpp"

namespace contagion {

namespace {

void build_csr(int n, const std::vector<std::pair<int, int>>& arcs, std::vector<std::int64_t>& off,
               std::vector<int>& adj, bool by_target) {
    off.assign(static_cast<std::size_t>(n) + 1, 0);
    for (auto [u, v] : arcs) ++off[(by_target ? v : u) + 1];
    for (int i = 0; i < n; ++i) off[i + 1] += off[i];
    adj.assign(arcs.size(), 0);
    std::vector<std::int64_t> pos(off.begin(), off.end() - 1);
    for (auto [u, v] : arcs) {
        int key = by_target ? v : u;
        adj[pos[key]++] = by_target ? u : v;
    }
    for (int i = 0; i < n; ++i) std::sort(adj.begin() + off[i], adj.begin() + off[i + 1]);
}

}  // namespace

Graph::Graph(int n, bool directed, std::vector<std::pair<int, int>> edges)
    : n_(n), directed_(directed), edges_(std::move(edges)) {
    if (n < 0) throw ValidationError("n", "vertex count must be nonnegative");
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        auto [u, v] = edges_[i];
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw VertexOutOfRange("edges[" + std::to_string(i) + "]",
                                   "vertex id out of range [0," + std::to_string(n) + ")");
        if (u == v) throw SelfLoop("edges[" + std::to_string(i) + "]", "self-loop on vertex " + std::to_string(u));
    }
    std::sort(edges_.begin(), edges_.end());
    std::vector<std::pair<int, int>> arcs;
    arcs.reserve(edges_.size() * (directed ? 1 : 2));
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (i > 0 && edges_[i] == edges_[i - 1])
            throw DuplicateEdge("edges", "duplicate edge (" + std::to_string(edges_[i].first) + "," +
                                             std::to_string(edges_[i].second) + ")");
        arcs.push_back(edges_[i]);
        if (!directed) arcs.emplace_back(edges_[i].second, edges_[i].first);
    }
    if (!directed) {
        std::vector<std::pair<int, int>> sorted_arcs = arcs;
        std::sort(sorted_arcs.begin(), sorted_arcs.end());
        if (std::adjacent_find(sorted_arcs.begin(), sorted_arcs.end()) != sorted_arcs.end())
            throw DuplicateEdge("edges", "edge listed in both directions of an undirected graph");
    }
    build_csr(n, arcs, in_off_, in_adj_, true);
    build_csr(n, arcs, out_off_, out_adj_, false);
}

Graph load_graph(const std::string& document) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        throw MalformedDocument("", std::string("graph document is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw MalformedDocument("", "graph document must be an object");
    if (!j.contains("n") || !j["n"].is_number_integer()) throw MalformedDocument("n", "missing or non-integer");
    if (!j.contains("edges") || !j["edges"].is_array()) throw MalformedDocument("edges", "missing or not an array");
    bool directed = true;
    if (j.contains("directed")) {
        if (!j["directed"].is_boolean()) throw MalformedDocument("directed", "must be boolean");
        directed = j["directed"].get<bool>();
    }
    long long n = j["n"].get<long long>();
    if (n < 0 || n > INT32_MAX) throw MalformedDocument("n", "out of range");
    std::vector<std::pair<int, int>> edges;
    edges.reserve(j["edges"].size());
    for (std::size_t i = 0; i < j["edges"].size(); ++i) {
        const auto& e = j["edges"][i];
        std::string field = "edges[" + std::to_string(i) + "]";
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            throw MalformedDocument(field, "edge must be a pair of integers");
        long long u = e[0].get<long long>(), v = e[1].get<long long>();
        if (u < 0 || v < 0 || u >= n || v >= n) throw VertexOutOfRange(field, "vertex id out of range");
        edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
    }
    return Graph(static_cast<int>(n), directed, std::move(edges));
}

std::string serialize_graph(const Graph& g) {
    nlohmann::ordered_json j;
    j["n"] = g.n();
    j["directed"] = g.directed();
    auto arr = nlohmann::ordered_json::array();
    for (auto [u, v] : g.edges()) arr.push_back({u, v});
    j["edges"] = std::move(arr);
    return j.dump();
}

std::pair<double, double> neighbor_fractions(const Graph& g, const StateVector& state, int v) {
    if (v < 0 || v >= g.n()) throw VertexOutOfRange("v", "vertex id out of range");
    auto in = g.in_neighbors(v);
    if (in.empty()) throw ValidationError("v", "vertex " + std::to_string(v) + " has no in-neighbors");
    int r = 0, b = 0;
    for (int u : in) {
        r += state[u] == VState::R;
        b += state[u] == VState::B;
    }
    double d = static_cast<double>(in.size());
    return {r / d, b / d};
}

std::vector<int> weak_components(const Graph& g, int* count) {
    std::vector<int> parent(g.n());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto [u, v] : g.edges()) {
        int a = find(u), b = find(v);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<int> id(g.n(), -1);
    int c = 0;
    for (int v = 0; v < g.n(); ++v) {
        int r = find(v);
        if (id[r] < 0) id[r] = c++;
        id[v] = id[r];
    }
    if (count) *count = c;
    return id;
}

}  // namespace contagion
