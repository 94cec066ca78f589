#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "contagion/game.hpp"
#include "contagion/layered.hpp"
#include "contagion/symmetry.hpp"

namespace contagion {

class PayoffOracle {
public:
    virtual ~PayoffOracle() = default;
    virtual PayoffEstimate evaluate(const Allocation& red, const Allocation& blue) const = 0;
    virtual PayoffMethod method() const = 0;
    bool statistical() const { return method() == PayoffMethod::MonteCarlo; }
};

class ExactOracle : public PayoffOracle {
public:
    explicit ExactOracle(GameSpec game, ExactOptions opts = {}) : game_(std::move(game)), opts_(opts) {}
    PayoffEstimate evaluate(const Allocation& red, const Allocation& blue) const override;
    PayoffMethod method() const override { return PayoffMethod::ExactEnumeration; }

private:
    GameSpec game_;
    ExactOptions opts_;
};

class LayeredOracle : public PayoffOracle {
public:
    explicit LayeredOracle(LayeredGame game) : game_(std::move(game)) {}
    PayoffEstimate evaluate(const Allocation& red, const Allocation& blue) const override;
    PayoffMethod method() const override { return PayoffMethod::ExactLayeredDp; }

private:
    LayeredGame game_;
};

// Every profile is estimated with the same master seed.
class MonteCarloOracle : public PayoffOracle {
public:
    MonteCarloOracle(GameSpec game, std::int64_t n_trials, std::uint64_t seed, int threads = 0)
        : game_(std::move(game)), n_trials_(n_trials), seed_(seed), threads_(threads) {}
    PayoffEstimate evaluate(const Allocation& red, const Allocation& blue) const override;
    PayoffMethod method() const override { return PayoffMethod::MonteCarlo; }

private:
    GameSpec game_;
    std::int64_t n_trials_;
    std::uint64_t seed_;
    int threads_;
};

constexpr double kExactNashEps = 1e-9;

// What equilibrium search needs to know about a game.
struct GameView {
    int n = 0;
    int K_R = 1;
    int K_B = 1;
    std::shared_ptr<const PayoffOracle> oracle;
    SymmetryClasses classes;  // singletons give plain exhaustive search
    std::uint64_t cap = 200'000;
    double eps = kExactNashEps;
};

GameView make_view(const GameSpec& game, std::shared_ptr<const PayoffOracle> oracle, bool use_symmetry = true);
GameView make_view(const LayeredGame& game);

// Memoised evaluation keyed by joint orbit.
class PayoffCache {
public:
    explicit PayoffCache(const GameView& v) : view_(&v) {}
    const PayoffEstimate& get(const Allocation& red, const Allocation& blue);
    std::size_t evaluations() const { return map_.size(); }

private:
    const GameView* view_;
    std::map<std::vector<int>, PayoffEstimate> map_;
};

std::vector<Allocation> enumerate_allocations(int n, int K, std::uint64_t cap = 200'000);

struct BestResponse {
    Allocation allocation;
    double payoff = 0.0;
    double stderr_ = 0.0;
};

// Best response of player p to the opponent's allocation; ties go to the
// lexicographically smallest seed list.
BestResponse best_response(const GameView& view, Player p, const Allocation& opponent, PayoffCache* cache = nullptr);

struct NashEntry {
    Allocation red, blue;
    PayoffEstimate payoff;
};

struct NashReport {
    std::vector<NashEntry> equilibria;
    double eps = 0.0;
    bool statistical = false;
    PayoffMethod method = PayoffMethod::ExactEnumeration;
    std::uint64_t red_space = 0;   // orbit representatives searched
    std::uint64_t profiles = 0;    // profile orbits evaluated
    bool symmetry_reduced = false;
};

NashReport find_pure_nash(const GameView& view);

// Largest unilateral gain available to each player at a profile.
struct NashCheck {
    bool is_nash = false;
    double red_gain = 0.0;
    double blue_gain = 0.0;
    Allocation red_best, blue_best;
    PayoffEstimate payoff;
};
NashCheck check_nash(const GameView& view, const Allocation& red, const Allocation& blue, PayoffCache* cache = nullptr);

enum class MaxJointMode { Exhaustive, HillClimb };

struct MaxJoint {
    Allocation red, blue;
    double value = 0.0;
    bool lower_bound = false;
};
MaxJoint max_joint_payoff(const GameView& view, MaxJointMode mode = MaxJointMode::Exhaustive, int restarts = 8,
                          std::uint64_t seed = 1);

struct EfficiencyReport {
    std::optional<MaxJoint> max_joint;
    NashReport nash;
    bool has_pure_nash = false;
    double worst_nash_joint = 0.0;
    double best_nash_joint = 0.0;
    std::size_t worst_index = 0, best_index = 0;
    double poa = 0.0;
    bool poa_infinite = false;
    double bm = 0.0;
    bool bm_infinite = false;
    std::size_t bm_index = 0;
    double budget_ratio = 1.0;  // K_smaller / K_larger
    std::vector<std::string> caveats;
};

EfficiencyReport price_of_anarchy(const GameView& view, MaxJointMode mode = MaxJointMode::Exhaustive);
EfficiencyReport budget_multiplier(const GameView& view);

// (Pi_larger / Pi_smaller) * (K_smaller / K_larger); infinite when the
// smaller-budget payoff is zero.
double budget_multiplier_of(const PayoffEstimate& e, int K_R, int K_B, bool* infinite = nullptr);

}  // namespace contagion
