#include "contagion/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "contagion/errors.hpp"
#include "contagion/rng.hpp"

namespace contagion {

PayoffEstimate ExactOracle::evaluate(const Allocation& red, const Allocation& blue) const {
    PayoffEstimate e;
    e.method = PayoffMethod::ExactEnumeration;
    std::tie(e.pi_R, e.pi_B) = exact_pure_payoffs(game_, red, blue, opts_);
    return e;
}

PayoffEstimate LayeredOracle::evaluate(const Allocation& red, const Allocation& blue) const {
    PayoffEstimate e;
    e.method = PayoffMethod::ExactLayeredDp;
    std::tie(e.pi_R, e.pi_B) = layered_pure_payoffs(game_, red, blue, &e.truncated_mass);
    return e;
}

PayoffEstimate MonteCarloOracle::evaluate(const Allocation& red, const Allocation& blue) const {
    return estimate_payoffs(game_, StrategyProfile::pure(red, blue), n_trials_, seed_, threads_);
}

GameView make_view(const GameSpec& game, std::shared_ptr<const PayoffOracle> oracle, bool use_symmetry) {
    GameView v;
    v.n = game.graph->n();
    v.K_R = game.K_R;
    v.K_B = game.K_B;
    v.oracle = std::move(oracle);
    v.classes = use_symmetry ? twin_classes(*game.graph, game.schedule) : SymmetryClasses::singletons(v.n);
    return v;
}

GameView make_view(const LayeredGame& game) {
    GameView v;
    v.n = game.n();
    v.K_R = game.K_R;
    v.K_B = game.K_B;
    v.oracle = std::make_shared<LayeredOracle>(game);
    v.classes = layer_classes(game);
    return v;
}

const PayoffEstimate& PayoffCache::get(const Allocation& red, const Allocation& blue) {
    auto key = canonical_profile_key(view_->classes, red, blue);
    auto it = map_.find(key);
    if (it == map_.end()) it = map_.emplace(std::move(key), view_->oracle->evaluate(red, blue)).first;
    return it->second;
}

std::vector<Allocation> enumerate_allocations(int n, int K, std::uint64_t cap) {
    if (n < 1 || K < 0) throw ValidationError("enumerate_allocations", "need n >= 1 and K >= 0");
    return orbit_representatives(SymmetryClasses::singletons(n), K, cap);
}

namespace {

constexpr double kTieTol = 1e-12;

double se_of(const PayoffEstimate& e, Player p) { return p == Player::Red ? e.stderr_R : e.stderr_B; }

double tolerance(const GameView& v, double se_a, double se_b) {
    if (!v.oracle->statistical()) return v.eps;
    return std::max(v.eps, 6.0 * std::max(se_a, se_b));
}

int budget_of(const GameView& v, Player p) { return p == Player::Red ? v.K_R : v.K_B; }

}  // namespace

BestResponse best_response(const GameView& view, Player p, const Allocation& opponent, PayoffCache* cache) {
    PayoffCache local(view);
    PayoffCache& c = cache ? *cache : local;
    auto reps = orbit_representatives(refine(view.classes, opponent), budget_of(view, p), view.cap);
    BestResponse best;
    best.payoff = -std::numeric_limits<double>::infinity();
    for (const auto& a : reps) {
        const auto& e = p == Player::Red ? c.get(a, opponent) : c.get(opponent, a);
        if (e.pi(p) > best.payoff + kTieTol) {
            best.allocation = a;
            best.payoff = e.pi(p);
            best.stderr_ = se_of(e, p);
        }
    }
    return best;
}

NashCheck check_nash(const GameView& view, const Allocation& red, const Allocation& blue, PayoffCache* cache) {
    PayoffCache local(view);
    PayoffCache& c = cache ? *cache : local;
    NashCheck out;
    out.payoff = c.get(red, blue);
    auto br = best_response(view, Player::Red, blue, &c);
    auto bb = best_response(view, Player::Blue, red, &c);
    out.red_best = br.allocation;
    out.blue_best = bb.allocation;
    out.red_gain = br.payoff - out.payoff.pi_R;
    out.blue_gain = bb.payoff - out.payoff.pi_B;
    out.is_nash = out.red_gain <= tolerance(view, br.stderr_, out.payoff.stderr_R) &&
                  out.blue_gain <= tolerance(view, bb.stderr_, out.payoff.stderr_B);
    return out;
}

NashReport find_pure_nash(const GameView& view) {
    NashReport rep;
    rep.method = view.oracle->method();
    rep.statistical = view.oracle->statistical();
    rep.eps = view.eps;
    rep.symmetry_reduced = view.classes.members.size() < static_cast<std::size_t>(view.n);
    PayoffCache cache(view);
    auto reds = orbit_representatives(view.classes, view.K_R, view.cap);
    rep.red_space = reds.size();
    double max_se = 0.0;
    // Red's best-response value depends only on the orbit of Blue's allocation.
    std::map<std::vector<int>, BestResponse> red_br;
    const Allocation none(view.n, {});
    for (const auto& r : reds) {
        auto blues = orbit_representatives(refine(view.classes, r), view.K_B, view.cap);
        double best_b = -std::numeric_limits<double>::infinity();
        double best_se = 0.0;
        for (const auto& b : blues) {
            const auto& e = cache.get(r, b);
            if (e.pi_B > best_b + kTieTol) {
                best_b = e.pi_B;
                best_se = e.stderr_B;
            }
        }
        rep.profiles += blues.size();
        for (const auto& b : blues) {
            PayoffEstimate e = cache.get(r, b);
            if (best_b - e.pi_B > tolerance(view, best_se, e.stderr_B)) continue;
            auto key = canonical_profile_key(view.classes, none, b);
            auto it = red_br.find(key);
            if (it == red_br.end()) it = red_br.emplace(std::move(key), best_response(view, Player::Red, b, &cache)).first;
            const auto& br = it->second;
            if (br.payoff - e.pi_R > tolerance(view, br.stderr_, e.stderr_R)) continue;
            max_se = std::max({max_se, e.stderr_R, e.stderr_B, br.stderr_, best_se});
            rep.equilibria.push_back({r, b, e});
        }
    }
    if (rep.statistical) rep.eps = std::max(view.eps, 6.0 * max_se);
    return rep;
}

MaxJoint max_joint_payoff(const GameView& view, MaxJointMode mode, int restarts, std::uint64_t seed) {
    PayoffCache cache(view);
    MaxJoint best;
    best.value = -std::numeric_limits<double>::infinity();
    if (mode == MaxJointMode::Exhaustive) {
        for (const auto& r : orbit_representatives(view.classes, view.K_R, view.cap))
            for (const auto& b : orbit_representatives(refine(view.classes, r), view.K_B, view.cap)) {
                double j = cache.get(r, b).joint();
                if (j > best.value + kTieTol) best = {r, b, j, false};
            }
        return best;
    }
    // Hill climbing over single-seed relocations to one vertex per class.
    Rng rng(seed);
    auto random_alloc = [&](int K) {
        std::vector<int> s;
        for (int i = 0; i < K; ++i) s.push_back(static_cast<int>(rng.below(view.n)));
        return Allocation(view.n, s);
    };
    for (int rs = 0; rs < std::max(1, restarts); ++rs) {
        Allocation r = random_alloc(view.K_R), b = random_alloc(view.K_B);
        double cur = cache.get(r, b).joint();
        for (bool improved = true; improved;) {
            improved = false;
            auto cls = refine(refine(view.classes, r), b);
            for (int who = 0; who < 2 && !improved; ++who) {
                const Allocation& a = who == 0 ? r : b;
                for (auto [v, cnt] : a.support()) {
                    for (const auto& m : cls.members) {
                        int w = m.front();
                        if (w == v) continue;
                        std::vector<int> s = a.seeds();
                        *std::find(s.begin(), s.end(), v) = w;
                        Allocation moved(view.n, s);
                        double j = who == 0 ? cache.get(moved, b).joint() : cache.get(r, moved).joint();
                        if (j > cur + kTieTol) {
                            (who == 0 ? r : b) = moved;
                            cur = j;
                            improved = true;
                            break;
                        }
                    }
                    if (improved) break;
                }
            }
        }
        if (cur > best.value + kTieTol) best = {r, b, cur, true};
    }
    best.lower_bound = true;
    return best;
}

double budget_multiplier_of(const PayoffEstimate& e, int K_R, int K_B, bool* infinite) {
    bool red_larger = K_R >= K_B;
    double pl = red_larger ? e.pi_R : e.pi_B, ps = red_larger ? e.pi_B : e.pi_R;
    double kl = red_larger ? K_R : K_B, ks = red_larger ? K_B : K_R;
    if (infinite) *infinite = ps <= 0.0;
    if (ps <= 0.0) return std::numeric_limits<double>::infinity();
    return pl / ps * (ks / kl);
}

namespace {

void fill_nash_summary(EfficiencyReport& rep) {
    rep.has_pure_nash = !rep.nash.equilibria.empty();
    rep.caveats.push_back("pure equilibria only; a mixed equilibrium with lower joint payoff would raise the PoA");
    if (rep.nash.statistical) rep.caveats.push_back("payoffs are Monte Carlo estimates; equilibrium status is statistical");
    if (!rep.has_pure_nash) {
        rep.caveats.push_back("no pure Nash equilibrium");
        return;
    }
    rep.worst_nash_joint = std::numeric_limits<double>::infinity();
    rep.best_nash_joint = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rep.nash.equilibria.size(); ++i) {
        double j = rep.nash.equilibria[i].payoff.joint();
        if (j < rep.worst_nash_joint - kTieTol) {
            rep.worst_nash_joint = j;
            rep.worst_index = i;
        }
        if (j > rep.best_nash_joint + kTieTol) {
            rep.best_nash_joint = j;
            rep.best_index = i;
        }
    }
}

}  // namespace

EfficiencyReport price_of_anarchy(const GameView& view, MaxJointMode mode) {
    EfficiencyReport rep;
    rep.nash = find_pure_nash(view);
    fill_nash_summary(rep);
    rep.max_joint = max_joint_payoff(view, mode);
    if (rep.max_joint->lower_bound) rep.caveats.push_back("max joint payoff is a hill-climbing lower bound");
    if (rep.has_pure_nash) {
        if (rep.worst_nash_joint <= 0.0) {
            rep.poa_infinite = true;
            rep.poa = std::numeric_limits<double>::infinity();
        } else {
            rep.poa = rep.max_joint->value / rep.worst_nash_joint;
        }
    }
    int kl = std::max(view.K_R, view.K_B), ks = std::min(view.K_R, view.K_B);
    rep.budget_ratio = static_cast<double>(ks) / kl;
    return rep;
}

EfficiencyReport budget_multiplier(const GameView& view) {
    EfficiencyReport rep;
    rep.nash = find_pure_nash(view);
    fill_nash_summary(rep);
    int kl = std::max(view.K_R, view.K_B), ks = std::min(view.K_R, view.K_B);
    rep.budget_ratio = static_cast<double>(ks) / kl;
    if (!rep.has_pure_nash) return rep;
    rep.bm = -1.0;
    for (std::size_t i = 0; i < rep.nash.equilibria.size(); ++i) {
        bool inf = false;
        double bm = budget_multiplier_of(rep.nash.equilibria[i].payoff, view.K_R, view.K_B, &inf);
        if (bm > rep.bm + kTieTol) {
            rep.bm = bm;
            rep.bm_infinite = inf;
            rep.bm_index = i;
        }
    }
    if (rep.bm_infinite) rep.caveats.push_back("smaller-budget player earns zero at the maximising equilibrium");
    return rep;
}

}  // namespace contagion
