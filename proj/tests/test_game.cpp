#include <gtest/gtest.h>

#include <cmath>

#include "contagion/errors.hpp"
#include "fixtures.hpp"

using namespace contagion;

TEST(Allocation, CountsAndBudget) {
    Allocation a(4, {2, 0, 2});
    EXPECT_EQ(a.budget(), 3);
    EXPECT_EQ(a.counts(), (std::vector<int>{1, 0, 2, 0}));
    EXPECT_EQ(Allocation::from_counts({1, 0, 2, 0}), a);
    EXPECT_EQ(a.support().size(), 2u);
    EXPECT_THROW(Allocation(3, {3}), ValidationError);
}

TEST(Profile, Validation) {
    Allocation r(3, {0}), b(3, {1, 2});
    EXPECT_NO_THROW(validate_profile(StrategyProfile::pure(r, b), 3, 1, 2));
    EXPECT_THROW(validate_profile(StrategyProfile::pure(r, b), 3, 1, 1), ValidationError);
    MixedStrategy m{{{0.5, r}, {0.4, Allocation(3, {1})}}};
    EXPECT_THROW(validate_profile({m, MixedStrategy::pure(b)}, 3, 1, 2), ValidationError);
}

TEST(ResolveSeeds, Proportional) {
    Rng rng(1);
    Allocation r(3, {0, 0, 1}), b(3, {1});
    int red1 = 0;
    const int T = 20000;
    for (int i = 0; i < T; ++i) {
        auto s = resolve_contested_seeds(r, b, rng);
        EXPECT_EQ(s[0], VState::R);
        EXPECT_EQ(s[2], VState::U);
        red1 += s[1] == VState::R;
    }
    EXPECT_NEAR(red1 / double(T), 0.5, 4 * std::sqrt(0.25 / T));
}

namespace {

GameSpec component_one(const AdoptionFunction& dyn) { return fx::hub_components({10}, 2, dyn, 1, 1); }

}  // namespace

TEST(ExactPayoffs, ComponentOneFixture) {
    auto g = component_one(fx::linear());
    auto e = exact_payoffs(g, StrategyProfile::pure(Allocation(10, {0}), Allocation(10, {1})));
    EXPECT_DOUBLE_EQ(e.pi_R, 5.0);
    EXPECT_DOUBLE_EQ(e.pi_B, 5.0);
    EXPECT_EQ(e.method, PayoffMethod::ExactEnumeration);
    EXPECT_EQ(e.stderr_R, 0.0);
}

TEST(ExactPayoffs, ThreeHubFixture) {
    auto g = fx::hub_components({33}, 3, fx::linear(), 1, 2);
    auto e = exact_payoffs(g, StrategyProfile::pure(Allocation(33, {0}), Allocation(33, {1, 2})));
    EXPECT_NEAR(e.pi_R, 11.0, 1e-12);
    EXPECT_NEAR(e.pi_B, 22.0, 1e-12);
}

TEST(ExactPayoffs, ThreeVertexPathByHand) {
    // 0 -> 1 -> 2 with f = x^0.5 under parallel rounds: vertex 1 sees
    // fraction 1 and is infected in round 1; vertex 2 follows in round 2.
    auto g = std::make_shared<Graph>(3, true, std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
    GameSpec gs{g, fx::power_tullock(0.5, 1.0), ParallelRounds{3, false}, 1, 1};
    auto e = exact_payoffs(gs, StrategyProfile::pure(Allocation(3, {0}), Allocation(3, {0})));
    // contested seed: each colour half the time, then everything follows
    EXPECT_NEAR(e.pi_R, 1.5, 1e-12);
    EXPECT_NEAR(e.pi_B, 1.5, 1e-12);

    // 0 -> 2, 1 -> 2, single pass over 2 only; Red on 0: f(1/2) = sqrt(1/2)
    auto g2 = std::make_shared<Graph>(3, true, std::vector<std::pair<int, int>>{{0, 2}, {1, 2}});
    GameSpec gs2{g2, fx::power_tullock(0.5, 1.0), SinglePassOrder{{2}}, 1, 1};
    auto e2 = exact_payoffs(gs2, StrategyProfile::pure(Allocation(3, {0}), Allocation(3, {0})));
    EXPECT_NEAR(e2.pi_R + e2.pi_B, 1.0 + std::sqrt(0.5), 1e-12);
}

TEST(ExactPayoffs, MatchesBruteForce) {
    Rng rng(2024);
    for (int t = 0; t < 150; ++t) {
        int n = 3 + static_cast<int>(rng.below(5));
        auto g = fx::random_graph(n, 0.3 + 0.3 * rng.uniform(), rng);
        UpdateSchedule sched;
        switch (t % 4) {
            case 0: sched = ParallelRounds{1 + static_cast<int>(rng.below(n)), false}; break;
            case 1: sched = ParallelRounds{1 + static_cast<int>(rng.below(n)), true}; break;
            case 2: sched = SinglePassOrder{fx::random_permutation(n, rng)}; break;
            default: {
                auto p = fx::random_permutation(n, rng);
                LayerOrder lo;
                lo.layers.push_back({p.begin(), p.begin() + n / 2});
                lo.layers.push_back({p.begin() + n / 2, p.end()});
                sched = lo;
            }
        }
        double r = rng.uniform() < 0.5 ? 0.5 : 1.0 + rng.uniform();
        auto dyn = fx::power_tullock(r, 0.5 + 2 * rng.uniform());
        GameSpec gs{g, dyn, sched, 2, 2};
        auto red = fx::random_allocation(n, 2, rng), blue = fx::random_allocation(n, 2, rng);
        auto ref = fx::brute_force(gs, red, blue);
        auto got = exact_pure_payoffs(gs, red, blue);
        EXPECT_NEAR(got.first, ref.first, 1e-10) << "instance " << t;
        EXPECT_NEAR(got.second, ref.second, 1e-10) << "instance " << t;
    }
}

TEST(ExactPayoffs, ColourSwapSymmetry) {
    Rng rng(77);
    for (int t = 0; t < 40; ++t) {
        int n = 4 + static_cast<int>(rng.below(4));
        auto g = fx::random_graph(n, 0.4, rng);
        GameSpec gs{g, fx::power_tullock(0.7, 0.8), ParallelRounds{n, false}, 2, 1};
        GameSpec sw = gs;
        std::swap(sw.K_R, sw.K_B);
        auto a = fx::random_allocation(n, 2, rng), b = fx::random_allocation(n, 1, rng);
        auto x = exact_pure_payoffs(gs, a, b);
        auto y = exact_pure_payoffs(sw, b, a);
        EXPECT_NEAR(x.first, y.second, 1e-12);
        EXPECT_NEAR(x.second, y.first, 1e-12);
    }
}

TEST(ExactPayoffs, MixedSupportWeighting) {
    auto g = fx::hub_components({10, 100}, 2, fx::linear(), 1, 1);
    Allocation small(110, {0}), big(110, {10}), big2(110, {11});
    MixedStrategy red{{{0.25, small}, {0.75, big}}};
    auto e = exact_payoffs(g, {red, MixedStrategy::pure(big2)});
    auto p1 = exact_pure_payoffs(g, small, big2), p2 = exact_pure_payoffs(g, big, big2);
    EXPECT_NEAR(e.pi_R, 0.25 * p1.first + 0.75 * p2.first, 1e-12);
    EXPECT_NEAR(e.pi_B, 0.25 * p1.second + 0.75 * p2.second, 1e-12);
}

TEST(ExactPayoffs, CapAndRandomSequential) {
    auto g = component_one(fx::linear());
    GameSpec rs = g;
    rs.schedule = RandomSequential{20};
    EXPECT_THROW(exact_payoffs(rs, StrategyProfile::pure(Allocation(10, {0}), Allocation(10, {1}))), CapExceeded);

    // dense random graph with a tiny budget
    Rng rng(3);
    auto dense = fx::random_graph(14, 0.6, rng);
    GameSpec d{dense, fx::power_tullock(0.5, 1.0), ParallelRounds{14, false}, 1, 1};
    ExactOptions tiny;
    tiny.max_nodes = 50;
    EXPECT_THROW(exact_payoffs(d, StrategyProfile::pure(Allocation(14, {0}), Allocation(14, {1})), tiny),
                 CapExceeded);
}

TEST(MonteCarlo, DeterministicDynamicsZeroVariance) {
    auto g = fx::hub_components({6, 30}, 2, fx::linear(), 1, 1);
    g.dyn = AdoptionFunction::from_switch_select(SwitchingFunction::threshold(0.5), SelectionFunction::linear());
    // one hub per colour in separate components: every follower sees exactly
    // half its in-neighbours infected and always adopts
    auto prof = StrategyProfile::pure(Allocation(36, {0}), Allocation(36, {6}));
    auto mc = estimate_payoffs(g, prof, 2000, 5);
    auto ex = exact_payoffs(g, prof);
    EXPECT_EQ(mc.stderr_R + mc.stderr_B, 0.0);
    EXPECT_EQ(mc.pi_R, ex.pi_R);
    EXPECT_EQ(mc.pi_R, 5.0);
    EXPECT_EQ(mc.pi_B, 29.0);
}

TEST(MonteCarlo, FourSectionTotal) {
    auto g = fx::hub_components({10, 100}, 2, fx::linear(), 1, 1);
    auto mc = estimate_payoffs(g, StrategyProfile::pure(Allocation(110, {10}), Allocation(110, {11})), 20000, 17);
    double se = std::hypot(mc.stderr_R, mc.stderr_B);
    EXPECT_LE(std::abs(mc.pi_R + mc.pi_B - 100.0), 3 * se + 1e-12);
    EXPECT_EQ(mc.method, PayoffMethod::MonteCarlo);
    EXPECT_EQ(mc.n_trials, 20000);
}

TEST(MonteCarlo, AgreesWithExact) {
    Rng rng(99);
    int outside = 0;
    const int inst = 40;
    for (int t = 0; t < inst; ++t) {
        int n = 4 + static_cast<int>(rng.below(5));
        auto g = fx::random_graph(n, 0.35, rng);
        UpdateSchedule sched = t % 2 ? UpdateSchedule{ParallelRounds{n, t % 4 == 1}}
                                     : UpdateSchedule{SinglePassOrder{fx::random_permutation(n, rng)}};
        GameSpec gs{g, fx::power_tullock(0.5 + rng.uniform(), 0.5 + rng.uniform()), sched, 2, 1};
        auto prof = StrategyProfile::pure(fx::random_allocation(n, 2, rng), fx::random_allocation(n, 1, rng));
        auto ex = exact_payoffs(gs, prof);
        auto mc = estimate_payoffs(gs, prof, 4000, rng.next());
        if (std::abs(mc.pi_R - ex.pi_R) > 3 * mc.stderr_R + 1e-12) ++outside;
        if (std::abs(mc.pi_B - ex.pi_B) > 3 * mc.stderr_B + 1e-12) ++outside;
    }
    // 80 comparisons at 3 sigma: a handful of misses is expected at most
    EXPECT_LE(outside, 3);
}

TEST(MonteCarlo, IndependentOfWorkerCount) {
    auto g = fx::hub_components({10, 40}, 2, fx::power_tullock(0.5, 2.0), 1, 1);
    MixedStrategy red{{{0.5, Allocation(50, {0})}, {0.5, Allocation(50, {10})}}};
    StrategyProfile p{red, MixedStrategy::pure(Allocation(50, {11}))};
    auto serial = estimate_payoffs_serial(g, p, 3001, 42);
    for (int th : {1, 2, 3, 8}) {
        auto par = estimate_payoffs(g, p, 3001, 42, th);
        EXPECT_EQ(par.pi_R, serial.pi_R);
        EXPECT_EQ(par.pi_B, serial.pi_B);
        EXPECT_EQ(par.stderr_R, serial.stderr_R);
        EXPECT_EQ(par.stderr_B, serial.stderr_B);
    }
    auto other = estimate_payoffs(g, p, 3001, 43);
    EXPECT_NE(other.pi_R, serial.pi_R);
}

TEST(PairwiseSum, MatchesNaiveOnExactValues) {
    std::vector<double> x(1001);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
    EXPECT_EQ(pairwise_sum(x.data(), x.size()), 1000.0 * 1001.0 / 2.0);
    EXPECT_EQ(pairwise_sum(x.data(), 0), 0.0);
}
