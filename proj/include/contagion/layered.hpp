#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "contagion/game.hpp"

namespace contagion {

// Disjoint components, each a chain of complete bipartite stages between
// consecutive layers, updated layer by layer. Vertex ids are assigned
// component by component, layer by layer.
struct LayeredGame {
    std::vector<std::vector<int>> components;  // layer sizes per component
    AdoptionFunction dyn;
    int K_R = 1;
    int K_B = 1;

    struct Position {
        int component;
        int layer;
        int index;
    };

    int n() const;
    int vertex(int component, int layer, int index) const;
    Position locate(int v) const;
    // First vertex id of each (component, layer).
    std::vector<std::vector<int>> offsets() const;
    std::int64_t edge_count() const;

    // Explicit graph with a layer-order schedule; empty when the edge count
    // exceeds max_edges.
    std::optional<GameSpec> materialize(std::int64_t max_edges = 50'000'000) const;
};

void validate_layered(const LayeredGame& game);

// Exact expectations by dynamic programming over per-layer (Red, Blue)
// counts. truncated_mass reports probability dropped by pmf pruning.
PayoffEstimate layered_exact_payoffs(const LayeredGame& game, const StrategyProfile& profile);
std::pair<double, double> layered_pure_payoffs(const LayeredGame& game, const Allocation& red, const Allocation& blue,
                                               double* truncated_mass = nullptr);

}  // namespace contagion
