#pragma once

// Shared builders and a brute-force reference oracle for the tests.

#include <functional>
#include <memory>
#include <vector>

#include "contagion/game.hpp"
#include "contagion/rng.hpp"

namespace fx {

using namespace contagion;

inline AdoptionFunction linear() {
    return AdoptionFunction::from_switch_select(SwitchingFunction::power(1.0), SelectionFunction::linear());
}

inline AdoptionFunction power_tullock(double r, double s) {
    return AdoptionFunction::from_switch_select(SwitchingFunction::power(r), SelectionFunction::tullock(s));
}

// Components with `hubs` hubs each pointing at every follower; followers are
// updated once in id order.
inline GameSpec hub_components(const std::vector<int>& sizes, int hubs, const AdoptionFunction& dyn, int K_R,
                               int K_B) {
    std::vector<std::pair<int, int>> edges;
    std::vector<int> order;
    int base = 0;
    for (int s : sizes) {
        for (int h = 0; h < hubs; ++h)
            for (int f = hubs; f < s; ++f) edges.emplace_back(base + h, base + f);
        for (int f = hubs; f < s; ++f) order.push_back(base + f);
        base += s;
    }
    GameSpec g;
    g.graph = std::make_shared<Graph>(base, true, std::move(edges));
    g.dyn = dyn;
    g.schedule = SinglePassOrder{order};
    g.K_R = K_R;
    g.K_B = K_B;
    return g;
}

// Brute force over every seed resolution and every batch outcome, with no
// decomposition or memoisation. Parallel rounds stop when nothing is a
// candidate.
inline std::pair<double, double> brute_force(const GameSpec& game, const Allocation& red, const Allocation& blue) {
    const Graph& g = *game.graph;
    const int n = g.n();
    auto batches = schedule_batches(g, game.schedule);
    const bool immune = has_immunity(game.schedule);
    const bool rounds = std::holds_alternative<ParallelRounds>(game.schedule);

    std::vector<int> contested;
    StateVector base(n, VState::U);
    for (int v = 0; v < n; ++v) {
        int r = red.count(v), b = blue.count(v);
        if (r > 0 && b == 0) base[v] = VState::R;
        if (b > 0 && r == 0) base[v] = VState::B;
        if (r > 0 && b > 0) contested.push_back(v);
    }
    double ER = 0, EB = 0;

    std::function<void(std::size_t, StateVector&, std::vector<char>&, double)> walk =
        [&](std::size_t bi, StateVector& s, std::vector<char>& imm, double w) {
            auto candidate = [&](int v) {
                if (s[v] != VState::U || imm[v]) return false;
                for (int u : g.in_neighbors(v))
                    if (s[u] != VState::U) return true;
                return false;
            };
            bool any = false;
            if (bi < batches.size() && rounds)
                for (int v = 0; v < n && !any; ++v) any = candidate(v);
            if (bi >= batches.size() || (rounds && !any)) {
                for (auto x : s) {
                    ER += w * (x == VState::R);
                    EB += w * (x == VState::B);
                }
                return;
            }
            std::vector<int> cand;
            std::vector<std::pair<double, double>> pr;
            for (int v : batches[bi])
                if (candidate(v)) {
                    int cr = 0, cb = 0, d = g.in_degree(v);
                    for (int u : g.in_neighbors(v)) {
                        cr += s[u] == VState::R;
                        cb += s[u] == VState::B;
                    }
                    cand.push_back(v);
                    pr.push_back(game.dyn.probs(cr, cb, d));
                }
            std::function<void(std::size_t, double)> rec = [&](std::size_t i, double ww) {
                if (ww == 0.0) return;
                if (i == cand.size()) {
                    walk(bi + 1, s, imm, ww);
                    return;
                }
                int v = cand[i];
                double pR = pr[i].first, pB = pr[i].second;
                s[v] = VState::R;
                rec(i + 1, ww * pR);
                s[v] = VState::B;
                rec(i + 1, ww * pB);
                s[v] = VState::U;
                if (immune) imm[v] = 1;
                rec(i + 1, ww * (1 - pR - pB));
                imm[v] = 0;
            };
            rec(0, w);
        };

    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << contested.size()); ++mask) {
        StateVector s = base;
        double w = 1.0;
        for (std::size_t i = 0; i < contested.size(); ++i) {
            int v = contested[i];
            double pr = static_cast<double>(red.count(v)) / (red.count(v) + blue.count(v));
            bool isR = (mask >> i) & 1;
            s[v] = isR ? VState::R : VState::B;
            w *= isR ? pr : 1 - pr;
        }
        std::vector<char> imm(n, 0);
        walk(0, s, imm, w);
    }
    return {ER, EB};
}

// Random directed graph on n vertices with edge probability p.
inline std::shared_ptr<Graph> random_graph(int n, double p, Rng& rng) {
    std::vector<std::pair<int, int>> e;
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (u != v && rng.uniform() < p) e.emplace_back(u, v);
    return std::make_shared<Graph>(n, true, std::move(e));
}

inline std::vector<int> random_permutation(int n, Rng& rng) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(p[i], p[rng.below(i + 1)]);
    return p;
}

inline Allocation random_allocation(int n, int K, Rng& rng) {
    std::vector<int> s;
    for (int i = 0; i < K; ++i) s.push_back(static_cast<int>(rng.below(n)));
    return Allocation(n, s);
}

}  // namespace fx
