#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "contagion/equilibrium.hpp"
#include "contagion/errors.hpp"
#include "fixtures.hpp"

using namespace contagion;

namespace {

GameView exact_view(const GameSpec& g, bool sym = true) {
    return make_view(g, std::make_shared<ExactOracle>(g), sym);
}

AdoptionFunction half_point() {
    return AdoptionFunction::from_switch_select(SwitchingFunction::half_point(0.01), SelectionFunction::linear());
}

// Star: hub 0 pointing at leaves 1..n-1, parallel rounds.
GameSpec star(int n, int K_R, int K_B) {
    std::vector<std::pair<int, int>> e;
    for (int v = 1; v < n; ++v) e.emplace_back(0, v);
    return GameSpec{std::make_shared<Graph>(n, true, e), fx::linear(), ParallelRounds{n, false}, K_R, K_B};
}

UpdateSchedule random_compatible_schedule(int n, Rng& rng) {
    switch (rng.below(3)) {
        case 0: return ParallelRounds{1 + static_cast<int>(rng.below(n)), false};
        case 1: return SinglePassOrder{fx::random_permutation(n, rng)};
        default: {
            auto p = fx::random_permutation(n, rng);
            std::size_t cut = 1 + rng.below(n - 1);
            LayerOrder lo;
            lo.layers.push_back({p.begin(), p.begin() + cut});
            lo.layers.push_back({p.begin() + cut, p.end()});
            return lo;
        }
    }
}

}  // namespace

TEST(EnumerateAllocations, SmallCounts) {
    auto a = enumerate_allocations(2, 1);
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(a[0].counts(), (std::vector<int>{1, 0}));
    EXPECT_EQ(a[1].counts(), (std::vector<int>{0, 1}));
    auto b = enumerate_allocations(2, 2);
    ASSERT_EQ(b.size(), 3u);
    EXPECT_EQ(b[0].counts(), (std::vector<int>{2, 0}));
    EXPECT_EQ(b[1].counts(), (std::vector<int>{1, 1}));
    EXPECT_EQ(b[2].counts(), (std::vector<int>{0, 2}));
    EXPECT_EQ(enumerate_allocations(3, 2).size(), 6u);
    EXPECT_EQ(enumerate_allocations(7, 3).size(), 84u);
    EXPECT_THROW(enumerate_allocations(30, 4, 1000), CapExceeded);
}

TEST(Symmetry, RepresentativeCounts) {
    auto g = fx::hub_components({10, 100}, 2, fx::linear(), 1, 1);
    auto c = twin_classes(*g.graph, g.schedule);
    // hubs of each component and followers of each component
    EXPECT_EQ(c.members.size(), 4u);
    EXPECT_EQ(count_representatives(c, 1), 4u);
    // per class: stacked or split pair; plus one per pair of classes
    EXPECT_EQ(count_representatives(c, 2), 14u);
    EXPECT_EQ(orbit_representatives(c, 2, 100).size(), 14u);
    EXPECT_EQ(count_representatives(SymmetryClasses::singletons(5), 2), 15u);
}

TEST(BestResponse, OtherBigHub) {
    auto g = fx::hub_components({10, 100}, 2, fx::linear(), 1, 1);
    auto v = exact_view(g, false);
    auto br = best_response(v, Player::Blue, Allocation(110, {10}));
    EXPECT_EQ(br.allocation, Allocation(110, {11}));
    EXPECT_DOUBLE_EQ(br.payoff, 50.0);
}

TEST(BestResponse, HubOfStarAgainstEmptyOpponent) {
    auto g = star(6, 1, 0);
    auto v = exact_view(g, false);
    auto br = best_response(v, Player::Red, Allocation(6, {}));
    EXPECT_EQ(br.allocation, Allocation(6, {0}));
    EXPECT_DOUBLE_EQ(br.payoff, 6.0);
}

TEST(BestResponse, BeatsEveryAlternative) {
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        int n = 4 + static_cast<int>(rng.below(3));
        GameSpec g{fx::random_graph(n, 0.4, rng), fx::power_tullock(0.5, 1.0), random_compatible_schedule(n, rng), 2, 1};
        auto v = exact_view(g);
        auto opp = fx::random_allocation(n, 1, rng);
        auto br = best_response(v, Player::Red, opp);
        for (const auto& a : enumerate_allocations(n, 2))
            EXPECT_GE(br.payoff, exact_pure_payoffs(g, a, opp).first - 1e-9);
    }
}

TEST(FindPureNash, TwoComponentLinear) {
    auto g = fx::hub_components({10, 100}, 2, fx::linear(), 1, 1);
    auto rep = find_pure_nash(exact_view(g, false));
    ASSERT_FALSE(rep.equilibria.empty());
    for (const auto& e : rep.equilibria) {
        EXPECT_NEAR(e.payoff.joint(), 100.0, 1e-9);
        EXPECT_TRUE(e.red.count(10) + e.red.count(11) == 1);
        EXPECT_TRUE(e.blue.count(10) + e.blue.count(11) == 1);
        EXPECT_NE(e.red, e.blue);
    }
    EXPECT_EQ(rep.equilibria.size(), 2u);
}

TEST(FindPureNash, HalfPointAddsSmallComponentEquilibrium) {
    auto g = fx::hub_components({10, 100}, 2, half_point(), 1, 1);
    auto rep = find_pure_nash(exact_view(g, false));
    bool small = false;
    for (const auto& e : rep.equilibria)
        if (std::abs(e.payoff.joint() - 10.0) < 1e-9) {
            small = true;
            EXPECT_NEAR(e.payoff.pi_R, 5.0, 1e-12);
            EXPECT_NEAR(e.payoff.pi_B, 5.0, 1e-12);
        }
    EXPECT_TRUE(small);
}

TEST(FindPureNash, TwoIsolatedHubs) {
    auto g = fx::hub_components({2, 2}, 1, fx::linear(), 1, 1);
    auto rep = find_pure_nash(exact_view(g, false));
    // distinct hubs are Nash; sharing a hub gives 1 each, moving gives 2
    int distinct = 0;
    for (const auto& e : rep.equilibria) {
        if (e.red.count(0) && e.blue.count(2)) ++distinct;
        if (e.red.count(2) && e.blue.count(0)) ++distinct;
        EXPECT_NE(e.red, e.blue);
    }
    EXPECT_EQ(distinct, 2);
}

TEST(MaxJoint, Fixtures) {
    for (const auto& dyn : {fx::linear(), half_point()}) {
        auto g = fx::hub_components({10, 100}, 2, dyn, 1, 1);
        auto mj = max_joint_payoff(exact_view(g));
        EXPECT_NEAR(mj.value, 100.0, 1e-9);
        EXPECT_FALSE(mj.lower_bound);
        auto hc = max_joint_payoff(exact_view(g), MaxJointMode::HillClimb);
        EXPECT_TRUE(hc.lower_bound);
        EXPECT_LE(hc.value, mj.value + 1e-9);
    }
    auto s = star(5, 1, 1);
    auto mj = max_joint_payoff(exact_view(s, false));
    EXPECT_DOUBLE_EQ(mj.value, 5.0);
    EXPECT_EQ(mj.red, Allocation(5, {0}));
    EXPECT_EQ(mj.blue, Allocation(5, {0}));
}

TEST(PriceOfAnarchy, SectionFourFixtures) {
    auto lin = price_of_anarchy(exact_view(fx::hub_components({10, 100}, 2, fx::linear(), 1, 1)));
    EXPECT_DOUBLE_EQ(lin.poa, 1.0);
    auto hp = price_of_anarchy(exact_view(fx::hub_components({10, 100}, 2, half_point(), 1, 1)));
    EXPECT_DOUBLE_EQ(hp.poa, 10.0);
    EXPECT_DOUBLE_EQ(hp.worst_nash_joint, 10.0);
    EXPECT_LE(hp.worst_nash_joint, hp.best_nash_joint);
    EXPECT_LE(hp.best_nash_joint, hp.max_joint->value + 1e-9);
    for (const auto& dyn : {fx::linear(), half_point()}) {
        auto one = price_of_anarchy(exact_view(fx::hub_components({110}, 2, dyn, 1, 1)));
        EXPECT_DOUBLE_EQ(one.poa, 1.0);
    }
}

TEST(BudgetMultiplier, ThreeHubLinear) {
    auto g = fx::hub_components({33}, 3, fx::linear(), 1, 2);
    auto r = budget_multiplier(exact_view(g));
    ASSERT_TRUE(r.has_pure_nash);
    EXPECT_NEAR(r.bm, 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(r.budget_ratio, 0.5);
    const auto& e = r.nash.equilibria[r.bm_index];
    EXPECT_NEAR(e.payoff.pi_R, 11.0, 1e-12);
    EXPECT_NEAR(e.payoff.pi_B, 22.0, 1e-12);
}

TEST(BudgetMultiplier, ThreeHubConvexLargeFollowerLimit) {
    auto dyn = AdoptionFunction::from_switch_select(
        SwitchingFunction::table({{0.0, 0.0}, {2.0 / 3.0, 1.0 / 25.0}, {1.0, 1.0}}),
        SelectionFunction::tullock(std::log2(99.0)));
    const int followers = 100000;
    auto g = fx::hub_components({followers + 3}, 3, dyn, 1, 2);
    auto r = budget_multiplier(exact_view(g));
    ASSERT_TRUE(r.has_pure_nash);
    // Red on one hub, Blue on the other two: followers go Blue with odds 99:1
    double pr = 1 + followers / 100.0, pb = 2 + followers * 0.99;
    EXPECT_NEAR(r.bm, pb / pr / 2, 1e-6);
    EXPECT_NEAR(r.bm, 49.5, 0.5);
}

TEST(BudgetMultiplier, OneHubPerComponent) {
    for (double r : {0.5, 2.0}) {
        auto g = fx::hub_components({12, 12, 12}, 1, fx::power_tullock(r, 1.5), 2, 1);
        auto rep = budget_multiplier(exact_view(g));
        ASSERT_TRUE(rep.has_pure_nash);
        EXPECT_NEAR(rep.bm, 1.0, 1e-9);
    }
}

TEST(BudgetMultiplier, InfiniteWhenSmallerPlayerGetsNothing) {
    PayoffEstimate e;
    e.pi_R = 4;
    e.pi_B = 0;
    bool inf = false;
    budget_multiplier_of(e, 2, 1, &inf);
    EXPECT_TRUE(inf);
    e.pi_B = 1;
    EXPECT_DOUBLE_EQ(budget_multiplier_of(e, 2, 1, &inf), 2.0);
    EXPECT_FALSE(inf);
    // Blue as the larger player
    EXPECT_DOUBLE_EQ(budget_multiplier_of(e, 1, 2, &inf), 0.125);
}

// Random competitive instances: PoA and BM bounds, closure of the Nash set
// under an independent best-response check, and agreement between orbit and
// plain search.
TEST(PropertySuite, BoundsClosureAndSymmetry) {
    Rng rng(314);
    int with_nash = 0;
    for (int t = 0; t < 60; ++t) {
        int n = 3 + static_cast<int>(rng.below(4));
        double r = rng.below(2) ? 1.0 : 0.5;
        double s = t % 3 == 0 ? 1.0 : r + (1 - r) * rng.uniform();
        GameSpec g{fx::random_graph(n, 0.25 + 0.3 * rng.uniform(), rng), fx::power_tullock(r, s),
                   random_compatible_schedule(n, rng), 1 + static_cast<int>(rng.below(2)),
                   1 + static_cast<int>(rng.below(2))};
        auto sym = exact_view(g, true), plain = exact_view(g, false);
        auto a = price_of_anarchy(sym);
        auto b = price_of_anarchy(plain);
        ASSERT_EQ(a.has_pure_nash, b.has_pure_nash) << t;
        if (!a.has_pure_nash) continue;
        ++with_nash;
        EXPECT_NEAR(a.worst_nash_joint, b.worst_nash_joint, 1e-9) << t;
        EXPECT_NEAR(a.best_nash_joint, b.best_nash_joint, 1e-9) << t;
        EXPECT_NEAR(a.max_joint->value, b.max_joint->value, 1e-9) << t;
        EXPECT_GE(a.poa, 1 - 1e-9) << t;
        EXPECT_LE(a.poa, 4.0) << t;
        if (s == 1.0) {
            auto bm = budget_multiplier(plain);
            EXPECT_LE(bm.bm, 2.0 + 1e-9) << t;
        }
        for (const auto& e : b.nash.equilibria) {
            auto rb = best_response(plain, Player::Red, e.blue);
            auto bb = best_response(plain, Player::Blue, e.red);
            EXPECT_LE(rb.payoff, e.payoff.pi_R + 1e-9) << t;
            EXPECT_LE(bb.payoff, e.payoff.pi_B + 1e-9) << t;
        }
    }
    EXPECT_GT(with_nash, 30);
}

TEST(MonteCarloSearch, FlagsStatisticalStatus) {
    auto g = fx::hub_components({10, 100}, 2, fx::linear(), 1, 1);
    auto v = make_view(g, std::make_shared<MonteCarloOracle>(g, 2000, 9));
    auto rep = find_pure_nash(v);
    EXPECT_TRUE(rep.statistical);
    EXPECT_EQ(rep.method, PayoffMethod::MonteCarlo);
    bool found = false;
    for (const auto& e : rep.equilibria) found |= std::abs(e.payoff.joint() - 100.0) < 1.0;
    EXPECT_TRUE(found);
}
