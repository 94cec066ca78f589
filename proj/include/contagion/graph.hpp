#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace contagion {

enum class VState : std::uint8_t { U = 0, R = 1, B = 2 };

using StateVector = std::vector<VState>;

class Graph {
public:
    Graph() = default;
    // Throws VertexOutOfRange, SelfLoop or DuplicateEdge.
    Graph(int n, bool directed, std::vector<std::pair<int, int>> edges);

    int n() const { return n_; }
    bool directed() const { return directed_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    std::size_t edge_count() const { return edges_.size(); }

    std::span<const int> in_neighbors(int v) const {
        return {in_adj_.data() + in_off_[v], in_adj_.data() + in_off_[v + 1]};
    }
    std::span<const int> out_neighbors(int v) const {
        return {out_adj_.data() + out_off_[v], out_adj_.data() + out_off_[v + 1]};
    }
    int in_degree(int v) const { return static_cast<int>(in_off_[v + 1] - in_off_[v]); }
    int out_degree(int v) const { return static_cast<int>(out_off_[v + 1] - out_off_[v]); }

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.n_ == b.n_ && a.directed_ == b.directed_ && a.edges_ == b.edges_;
    }

private:
    int n_ = 0;
    bool directed_ = true;
    std::vector<std::pair<int, int>> edges_;  // sorted
    std::vector<std::int64_t> in_off_{0}, out_off_{0};
    std::vector<int> in_adj_, out_adj_;
};

Graph load_graph(const std::string& document);
std::string serialize_graph(const Graph& g);

// Red and Blue fractions among the in-neighbours of v.
std::pair<double, double> neighbor_fractions(const Graph& g, const StateVector& state, int v);

// Weakly connected component id per vertex, ids dense from 0.
std::vector<int> weak_components(const Graph& g, int* count = nullptr);

}  // namespace contagion
