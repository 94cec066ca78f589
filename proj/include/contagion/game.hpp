#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "contagion/dynamics.hpp"
#include "contagion/graph.hpp"
#include "contagion/rng.hpp"
#include "contagion/schedule.hpp"

namespace contagion {

enum class Player { Red, Blue };

// A player's seed placement, stored as the sorted multiset of seeded
// vertices (a vertex listed c times carries c seeds).
class Allocation {
public:
    Allocation() = default;
    Allocation(int n, std::vector<int> seeds);
    static Allocation from_counts(const std::vector<int>& counts);

    int n() const { return n_; }
    int budget() const { return static_cast<int>(seeds_.size()); }
    const std::vector<int>& seeds() const { return seeds_; }
    std::vector<int> counts() const;
    int count(int v) const;
    // (vertex, count) pairs in vertex order.
    std::vector<std::pair<int, int>> support() const;

    friend bool operator==(const Allocation&, const Allocation&) = default;
    friend auto operator<=>(const Allocation& a, const Allocation& b) { return a.seeds_ <=> b.seeds_; }

private:
    int n_ = 0;
    std::vector<int> seeds_;
};

struct MixedStrategy {
    std::vector<std::pair<double, Allocation>> support;

    static MixedStrategy pure(Allocation a) { return {{{1.0, std::move(a)}}}; }
    bool is_pure() const { return support.size() == 1; }
    const Allocation& pure_allocation() const { return support.front().second; }
};

struct StrategyProfile {
    MixedStrategy red, blue;

    static StrategyProfile pure(Allocation r, Allocation b) {
        return {MixedStrategy::pure(std::move(r)), MixedStrategy::pure(std::move(b))};
    }
    bool is_pure() const { return red.is_pure() && blue.is_pure(); }
};

// Throws ValidationError naming the offending field.
void validate_profile(const StrategyProfile& p, int n, int K_R, int K_B);

struct GameSpec {
    std::shared_ptr<const Graph> graph;
    AdoptionFunction dyn;
    UpdateSchedule schedule;
    int K_R = 1;
    int K_B = 1;
};

enum class PayoffMethod { ExactEnumeration, ExactLayeredDp, MonteCarlo };
std::string to_string(PayoffMethod m);

struct PayoffEstimate {
    double pi_R = 0.0;
    double pi_B = 0.0;
    PayoffMethod method = PayoffMethod::ExactEnumeration;
    std::int64_t n_trials = 0;
    double stderr_R = 0.0;
    double stderr_B = 0.0;
    // Probability mass dropped by pruning (layered DP only).
    double truncated_mass = 0.0;

    double joint() const { return pi_R + pi_B; }
    double pi(Player p) const { return p == Player::Red ? pi_R : pi_B; }
    bool exact() const { return method != PayoffMethod::MonteCarlo; }
};

constexpr std::int64_t kDefaultTrials = 20000;

StateVector resolve_contested_seeds(const Allocation& red, const Allocation& blue, Rng& rng);

// Worker count 0 means the OpenMP default. Results are identical for every
// worker count.
PayoffEstimate estimate_payoffs(const GameSpec& game, const StrategyProfile& profile, std::int64_t n_trials,
                                std::uint64_t master_seed, int threads = 0);
// Single-threaded reference with the same replication streams.
PayoffEstimate estimate_payoffs_serial(const GameSpec& game, const StrategyProfile& profile, std::int64_t n_trials,
                                       std::uint64_t master_seed);

struct ExactOptions {
    std::int64_t max_nodes = std::int64_t{1} << 22;
};

// Throws CapExceeded when the event tree does not fit the budget.
PayoffEstimate exact_payoffs(const GameSpec& game, const StrategyProfile& profile, const ExactOptions& opts = {});

// Pure-profile exact payoffs without input validation (hot path).
std::pair<double, double> exact_pure_payoffs(const GameSpec& game, const Allocation& red, const Allocation& blue,
                                             const ExactOptions& opts = {});

// Sums in pairwise order so results do not depend on how replications were
// partitioned across workers.
double pairwise_sum(const double* x, std::size_t n);

}  // namespace contagion
