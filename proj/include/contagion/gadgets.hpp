#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contagion/equilibrium.hpp"
#include "contagion/game.hpp"
#include "contagion/layered.hpp"

namespace contagion {

struct Prediction {
    double value = 0.0;
    std::string formula;
};

struct NamedDeviation {
    std::string name;
    Player player;
    Allocation allocation;
};

struct GadgetCondition {
    std::string name;
    std::string formula;
    bool holds = true;
};

// A generated construction: graph (explicit or layered), designated profile
// and closed-form predictions.
struct GadgetSpec {
    std::string kind;
    std::vector<std::pair<std::string, double>> params;
    std::optional<GameSpec> game;
    std::optional<LayeredGame> layered;
    int K_R = 1;
    int K_B = 1;
    Allocation red, blue;
    std::map<std::string, Prediction> predictions;
    std::vector<NamedDeviation> named_deviations;
    std::vector<GadgetCondition> conditions;
    std::string layout;

    int n() const { return game ? game->graph->n() : layered->n(); }
    AdoptionFunction dynamics() const { return game ? game->dyn : layered->dyn; }
    // Explicit game, materialising a layered one if it is small enough.
    std::optional<GameSpec> explicit_game(std::int64_t max_edges = 50'000'000) const;
    GameView view() const;
};

// Each component: hubs first, then followers; every hub points to every
// follower. Followers are updated once in id order. Red takes the first K_R
// hubs of the largest component, Blue the next K_B (wrapping to the start).
GadgetSpec influencer_components(const std::vector<int>& sizes, int hubs, int K_R, int K_B,
                                 const AdoptionFunction& dyn);

// Components (m, n1) and (m, n2); both players' seeds in the first layer of
// the first component.
GadgetSpec threshold_two_layer(int m, int n1, int n2, double alpha_star);

// Two flowers sharing stem sizes l_i = round(l1^(r^(i-1))), i < N, with final
// layers lN1 and lN2 (lN2 <= 0 selects round(2^(r^(N-1)) lN1 / 2)).
GadgetSpec convexity_amplifier(int l1, int N, double r, int lN1, int lN2, int k);

// C1 layers (4, n x k, n1) and C2 = (1, n2); Red holds 3 seeds, Blue 1.
GadgetSpec polarization_amplifier(int k, int n, int n1, double s);

// K + L inputs feeding M replicated chains of K two-input vertices, each
// ending in Nterm terminals. With L > 1, Blue's L inputs are folded into the
// chain through L - 1 extra vertices.
GadgetSpec chain_replication(int K, int M, int Nterm, int L = 1);

struct VerificationEntry {
    std::string name;
    double measured = 0.0;
    double predicted = 0.0;
    double rel_error = 0.0;
    bool pass = true;
    std::string note;
};

struct DeviationResult {
    std::string name;
    Player player;
    double payoff = 0.0;
    double baseline = 0.0;
    bool improving = false;
};

struct VerifyOptions {
    bool monte_carlo = false;        // cross-check designated payoffs by simulation
    std::int64_t trials = 10000;
    std::uint64_t seed = 1;
    int threads = 0;
    bool exhaustive = true;          // full orbit search when small enough
    std::uint64_t exhaustive_cap = 20000;  // profile orbits
};

struct VerificationReport {
    std::string kind;
    PayoffEstimate designated;
    std::vector<DeviationResult> deviations;
    std::vector<VerificationEntry> entries;
    std::vector<GadgetCondition> conditions;
    bool deviation_set_restricted = true;
    bool designated_is_nash = false;
    bool passed = false;
};

// All single-seed relocations (one target per symmetry class) plus the named
// deviations of the spec.
std::vector<NamedDeviation> deviation_set(const GadgetSpec& spec);

VerificationReport verify_gadget(const GadgetSpec& spec, const VerifyOptions& opts = {});

}  // namespace contagion
