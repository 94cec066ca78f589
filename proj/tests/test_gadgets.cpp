#include <gtest/gtest.h>

#include <cmath>

#include "contagion/errors.hpp"
#include "contagion/gadgets.hpp"
#include "fixtures.hpp"

using namespace contagion;

namespace {

const VerificationEntry* entry(const VerificationReport& r, const std::string& name) {
    for (const auto& e : r.entries)
        if (e.name == name) return &e;
    return nullptr;
}

VerifyOptions quick() {
    VerifyOptions o;
    o.exhaustive = false;
    return o;
}

}  // namespace

TEST(Influencer, StructureAndProfile) {
    auto g = influencer_components({10, 100}, 2, 1, 1, fx::linear());
    EXPECT_EQ(g.n(), 110);
    ASSERT_TRUE(g.game);
    EXPECT_EQ(g.game->graph->edge_count(), 2u * 8 + 2u * 98);
    EXPECT_EQ(g.red, Allocation(110, {10}));
    EXPECT_EQ(g.blue, Allocation(110, {11}));
    auto rep = verify_gadget(g);
    EXPECT_TRUE(rep.designated_is_nash);
    EXPECT_FALSE(rep.deviation_set_restricted);
    EXPECT_DOUBLE_EQ(rep.designated.joint(), 100.0);
}

TEST(Threshold, StructureAndPredictions) {
    auto g = threshold_two_layer(20, 10, 1000, 0.5);
    ASSERT_TRUE(g.layered);
    EXPECT_EQ(g.n(), 20 + 10 + 20 + 1000);
    EXPECT_EQ(g.K_R, 5);
    EXPECT_EQ(g.K_B, 5);
    EXPECT_EQ(g.layered->edge_count(), 20 * 10 + 20 * 1000);
    EXPECT_DOUBLE_EQ(g.predictions.at("designated_joint").value, 20.0);
    EXPECT_DOUBLE_EQ(g.predictions.at("max_joint").value, 1010.0);
    EXPECT_DOUBLE_EQ(g.predictions.at("poa_asymptotic").value, 100.0);
    EXPECT_FALSE(g.predictions.at("poa").formula.empty());
    EXPECT_THROW(threshold_two_layer(20, 10, 1000, 0.25), ValidationError);
}

TEST(Threshold, SplitSeedsInfectNothing) {
    auto g = threshold_two_layer(20, 10, 1000, 0.5);
    auto lg = *g.layered;
    // Red stays in C1, Blue moves to C2: neither reaches the threshold
    Allocation red(g.n(), {0, 1, 2, 3, 4}), blue(g.n(), {30, 31, 32, 33, 34});
    auto p = layered_pure_payoffs(lg, red, blue);
    EXPECT_DOUBLE_EQ(p.first, 5.0);
    EXPECT_DOUBLE_EQ(p.second, 5.0);
    auto d = layered_pure_payoffs(lg, g.red, g.blue);
    EXPECT_DOUBLE_EQ(d.first + d.second, 20.0);
}

TEST(Threshold, VerifiesDesignatedProfile) {
    auto rep = verify_gadget(threshold_two_layer(20, 10, 1000, 0.5), quick());
    EXPECT_TRUE(rep.designated_is_nash);
    EXPECT_TRUE(rep.passed);
    ASSERT_TRUE(entry(rep, "max_joint"));
    EXPECT_DOUBLE_EQ(entry(rep, "max_joint")->measured, 1010.0);
    for (const auto& d : rep.deviations) EXPECT_FALSE(d.improving) << d.name;
}

TEST(Convexity, StemSizesAndFinalLayers) {
    auto g = convexity_amplifier(4, 3, 2.0, 400, 0, 1);
    ASSERT_TRUE(g.layered);
    const auto& c = g.layered->components;
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c[0], (std::vector<int>{4, 16, 400}));
    // 2^(r^(N-1)) * lN1 / 2 = 16 * 400 / 2
    EXPECT_EQ(c[1], (std::vector<int>{4, 16, 3200}));
    EXPECT_DOUBLE_EQ(g.predictions.at("poa_bound").value, 8.0);
    EXPECT_DOUBLE_EQ(g.predictions.at("final_fraction_asymptotic").value, std::pow(0.5, 4.0));
}

TEST(Convexity, LayeredDPAgreesWithSimulation) {
    auto g = convexity_amplifier(4, 3, 2.0, 60, 0, 1);
    auto game = g.explicit_game();
    ASSERT_TRUE(game);
    auto dp = layered_exact_payoffs(*g.layered, StrategyProfile::pure(g.red, g.blue));
    auto mc = estimate_payoffs(*game, StrategyProfile::pure(g.red, g.blue), 20000, 3);
    EXPECT_LE(std::abs(dp.pi_R - mc.pi_R), 3 * mc.stderr_R + 1e-12);
    EXPECT_LE(std::abs(dp.pi_B - mc.pi_B), 3 * mc.stderr_B + 1e-12);
}

TEST(Convexity, RatioGrowsWithDepth) {
    double prev = 0;
    for (int N : {2, 3, 4}) {
        auto rep = verify_gadget(convexity_amplifier(4, N, 2.0, 2000, 0, 1), quick());
        auto e = entry(rep, "designated_ratio");
        ASSERT_TRUE(e);
        EXPECT_GT(e->measured, prev) << N;
        prev = e->measured;
    }
}

TEST(Polarization, StructureAndPayoffs) {
    auto g = polarization_amplifier(2, 200, 10000, 2.0);
    ASSERT_TRUE(g.layered);
    const auto& c = g.layered->components;
    EXPECT_EQ(c[0], (std::vector<int>{4, 200, 200, 10000}));
    // n2 = round(n1 a / (a + b)) with a = 3^-8, b = (2/3)^8, i.e. n1 / 257
    EXPECT_EQ(c[1], (std::vector<int>{1, 39}));
    EXPECT_EQ(g.K_R, 3);
    EXPECT_EQ(g.K_B, 1);
    auto rep = verify_gadget(g, quick());
    auto bm = entry(rep, "designated_bm");
    ASSERT_TRUE(bm);
    EXPECT_GE(bm->measured, 10000.0 / (4 * 39));
    EXPECT_THROW(polarization_amplifier(6, 50, 100, 2.0), ValidationError);
}

TEST(Chain, StructureAndExactPayoffs) {
    auto g = chain_replication(4, 17, 1000);
    ASSERT_TRUE(g.game);
    EXPECT_EQ(g.n(), 1 + 4 + 17 * (4 + 1000));
    // per replication: 2 in-edges per chain vertex and Nterm terminal edges
    EXPECT_EQ(g.game->graph->edge_count(), 17u * (2 * 4 + 1000));
    auto rep = verify_gadget(g, quick());
    double q = 1.0 / 16;
    EXPECT_NEAR(rep.designated.pi_R, 4 + 17 * (4 - (1 - q)) + 17 * 1000 * (1 - q), 1e-6);
    EXPECT_NEAR(rep.designated.pi_B, 1 + 17 * 1000 * q + 17 * (1 - q), 1e-6);
    EXPECT_TRUE(rep.passed);
}

TEST(Chain, ConditionFailsWithoutEnoughReplications) {
    auto rep = verify_gadget(chain_replication(4, 16, 1000), quick());
    EXPECT_FALSE(rep.passed);
    bool cond = false;
    for (const auto& c : rep.conditions) cond |= !c.holds;
    EXPECT_TRUE(cond);
}

TEST(Chain, MultiplierGrowsWithChainLength) {
    double prev = 0;
    for (int K = 2; K <= 5; ++K) {
        auto rep = verify_gadget(chain_replication(K, (1 << K) + 1, 1000), quick());
        auto e = entry(rep, "bm");
        ASSERT_TRUE(e);
        EXPECT_GT(e->measured, prev) << K;
        EXPECT_TRUE(rep.passed) << K;
        prev = e->measured;
    }
}

TEST(DeviationSet, IncludesNamedDeviations) {
    auto g = threshold_two_layer(20, 10, 1000, 0.5);
    auto ds = deviation_set(g);
    bool red = false, blue = false;
    for (const auto& d : ds) {
        red |= d.name == "red_all_to_c2";
        blue |= d.name == "blue_all_to_c2";
        EXPECT_EQ(d.allocation.budget(), d.player == Player::Red ? g.K_R : g.K_B);
    }
    EXPECT_TRUE(red && blue);
}
