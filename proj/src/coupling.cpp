#include "contagion/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "contagion/errors.hpp"
#include "contagion/parallel.hpp"
#include "contagion/process.hpp"
#include "contagion/rng.hpp"
#include "contagion/stats.hpp"

namespace contagion {

void require_coupling_schedule(const UpdateSchedule& sched) {
    if (std::holds_alternative<RandomSequential>(sched))
        throw ValidationError("schedule", "random_sequential schedules cannot be coupled step for step");
    if (has_immunity(sched))
        throw ValidationError("schedule", "parallel schedules with immunity are not coupling-compatible");
}

namespace {

bool total_nondecreasing(const AdoptionFunction& dyn, const Graph& g) {
    std::vector<int> dens{64};
    for (int v = 0; v < g.n(); ++v)
        if (g.in_degree(v) > 0) dens.push_back(g.in_degree(v));
    std::sort(dens.begin(), dens.end());
    dens.erase(std::unique(dens.begin(), dens.end()), dens.end());
    for (int d : dens) {
        double prev = 0.0;
        for (int k = 0; k <= d; ++k) {
            auto [pr, pb] = dyn.probs(k, 0, d);
            if (pr + pb < prev - kPredicateTol) return false;
            prev = pr + pb;
        }
    }
    return true;
}

// Calls fn(batch) for each batch; returns when fn reports no candidates on a
// repeated parallel round.
template <class Fn>
void for_each_batch(const Graph& g, const UpdateSchedule& sched, Fn&& fn) {
    if (auto* s = std::get_if<SinglePassOrder>(&sched)) {
        std::vector<int> one(1);
        for (int v : s->order) {
            one[0] = v;
            fn(one);
        }
    } else if (auto* l = std::get_if<LayerOrder>(&sched)) {
        for (const auto& layer : l->layers) fn(layer);
    } else if (auto* p = std::get_if<ParallelRounds>(&sched)) {
        std::vector<int> all(g.n());
        std::iota(all.begin(), all.end(), 0);
        for (int r = 0; r < p->max_rounds; ++r)
            if (!fn(all)) break;
    }
}

SimOutcome outcome_of(const Process& p) {
    SimOutcome o;
    o.state = p.states();
    o.chi_R = p.chi_R();
    o.chi_B = p.chi_B();
    return o;
}

template <class Invariant>
CoupledOutcome coupled_xy(const Graph& g, const Allocation& A_R, const Allocation& A_B, const AdoptionFunction& dyn,
                          const UpdateSchedule& sched, std::uint64_t rng_seed, Invariant inv) {
    require_coupling_schedule(sched);
    validate_schedule(g, sched);
    Rng rng(rng_seed);
    Allocation none(g.n(), {});
    Process X(g, resolve_contested_seeds(A_R, A_B, rng));
    Process Y(g, resolve_contested_seeds(A_R, none, rng));
    CoupledOutcome out;
    for (int v = 0; v < g.n(); ++v)
        if (!inv(X.state(v), Y.state(v))) ++out.violations;
    struct Upd {
        int v;
        VState x, y;
    };
    std::vector<Upd> pending;
    for_each_batch(g, sched, [&](const std::vector<int>& batch) {
        pending.clear();
        bool any = false;
        for (int v : batch) {
            bool cx = X.is_candidate(v), cy = Y.is_candidate(v);
            if (!cx && !cy) continue;
            any = true;
            double z = rng.uniform();
            VState x = VState::U, y = VState::U;
            if (cx) {
                auto [pr, pb] = X.probs(dyn, v);
                x = z < pr ? VState::R : (z < pr + pb ? VState::B : VState::U);
            }
            if (cy) {
                double py = Y.probs(dyn, v).first;
                y = z < py ? VState::R : VState::U;
            }
            pending.push_back({v, x, y});
        }
        for (const auto& u : pending) {
            if (u.x != VState::U) X.infect(u.v, u.x);
            if (u.y != VState::U) Y.infect(u.v, u.y);
        }
        for (const auto& u : pending)
            if (!inv(X.state(u.v), Y.state(u.v))) ++out.violations;
        return any;
    });
    out.joint = outcome_of(X);
    out.solo = outcome_of(Y);
    out.invariant_ok = out.violations == 0;
    return out;
}

}  // namespace

void require_lemma1_hypotheses(const AdoptionFunction& dyn, const Graph& g) {
    if (!check_competitive(dyn, kDefaultGridStep, &g).empty())
        throw HypothesisError("dynamics", "adoption function is not competitive");
    if (!check_additive(dyn, kDefaultGridStep, &g).empty())
        throw HypothesisError("dynamics", "total infection probability is not additive");
    if (!total_nondecreasing(dyn, g)) throw HypothesisError("dynamics", "total infection probability decreases");
}

void require_lemma2_hypotheses(const AdoptionFunction& dyn, const Graph& g) {
    if (!check_additive(dyn, kDefaultGridStep, &g).empty())
        throw HypothesisError("dynamics", "total infection probability is not additive");
    if (!total_nondecreasing(dyn, g)) throw HypothesisError("dynamics", "total infection probability decreases");
}

void require_attribution_hypotheses(const AdoptionFunction& dyn, const Graph& g) {
    require_lemma2_hypotheses(dyn, g);
    std::vector<int> dens{64};
    for (int v = 0; v < g.n(); ++v)
        if (g.in_degree(v) > 0) dens.push_back(g.in_degree(v));
    for (int d : dens)
        for (int i = 0; i <= d; ++i)
            for (int j = 0; i + j <= d; ++j) {
                if (i + j == 0) continue;
                auto [pr, pb] = dyn.probs(i, j, d);
                double total = pr + pb;
                if (std::abs(pr - total * i / (i + j)) > 1e-12)
                    throw HypothesisError("dynamics", "implied selection is not linear");
            }
}

CoupledOutcome coupled_solo_vs_joint(const Graph& g, const Allocation& A_R, const Allocation& A_B,
                                     const AdoptionFunction& dyn, const UpdateSchedule& sched, std::uint64_t rng_seed) {
    require_lemma1_hypotheses(dyn, g);
    return coupled_xy(g, A_R, A_B, dyn, sched, rng_seed,
                      [](VState x, VState y) { return x != VState::R || y == VState::R; });
}

CoupledOutcome coupled_joint_vs_solo_total(const Graph& g, const Allocation& A_R, const Allocation& A_B,
                                           const AdoptionFunction& dyn, const UpdateSchedule& sched,
                                           std::uint64_t rng_seed) {
    require_lemma2_hypotheses(dyn, g);
    return coupled_xy(g, A_R, A_B, dyn, sched, rng_seed,
                      [](VState x, VState y) { return y != VState::R || x != VState::U; });
}

namespace {

void check_seed_list(const Graph& g, const std::vector<int>& seeds) {
    std::vector<int> s = seeds;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
        throw ValidationError("seeds", "attribution seeds must be distinct vertices");
    for (int v : s)
        if (v < 0 || v >= g.n()) throw VertexOutOfRange("seeds", "seed out of range");
}

// Index-th infected in-neighbour of v.
int pick_infected(const Graph& g, const Process& p, int v, std::uint64_t index) {
    for (int u : g.in_neighbors(v))
        if (p.state(u) != VState::U && index-- == 0) return u;
    return -1;
}

struct Labeller {
    Process proc;
    std::vector<int> label;
    Labeller(const Graph& g, const StateVector& init, std::vector<int> lab) : proc(g, init), label(std::move(lab)) {}
};

LabelledOutcome finish(const Labeller& l, int K) {
    LabelledOutcome o;
    o.label = l.label;
    o.chi.assign(K, 0);
    for (int x : l.label)
        if (x > 0) ++o.chi[x - 1];
    o.chi_R = l.proc.chi_R();
    o.chi_B = l.proc.chi_B();
    return o;
}

}  // namespace

LabelledOutcome attribution_run(const Graph& g, const std::vector<int>& seeds, const AdoptionFunction& dyn,
                                const UpdateSchedule& sched, std::uint64_t rng_seed) {
    require_coupling_schedule(sched);
    validate_schedule(g, sched);
    check_seed_list(g, seeds);
    StateVector init(g.n(), VState::U);
    std::vector<int> lab(g.n(), 0);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        init[seeds[i]] = VState::R;
        lab[seeds[i]] = static_cast<int>(i) + 1;
    }
    Labeller L(g, init, lab);
    Rng rng(rng_seed);
    std::vector<std::pair<int, int>> pending;
    for_each_batch(g, sched, [&](const std::vector<int>& batch) {
        pending.clear();
        bool any = false;
        for (int v : batch) {
            if (!L.proc.is_candidate(v)) continue;
            any = true;
            auto [pr, pb] = L.proc.probs(dyn, v);
            double z = rng.uniform();
            if (z >= pr + pb) continue;
            int c = L.proc.red_count(v) + L.proc.blue_count(v);
            int src = pick_infected(g, L.proc, v, rng.below(c));
            pending.emplace_back(v, L.label[src]);
        }
        for (auto [v, lab_v] : pending) {
            L.proc.infect(v, VState::R);
            L.label[v] = lab_v;
        }
        return any;
    });
    return finish(L, static_cast<int>(seeds.size()));
}

CoupledAttribution coupled_attribution(const Graph& g, const std::vector<int>& seeds, int L,
                                       const AdoptionFunction& dyn, const UpdateSchedule& sched,
                                       std::uint64_t rng_seed) {
    require_coupling_schedule(sched);
    validate_schedule(g, sched);
    check_seed_list(g, seeds);
    require_attribution_hypotheses(dyn, g);
    if (L < 0 || L > static_cast<int>(seeds.size())) throw ValidationError("L", "must lie in [0, |seeds|]");
    StateVector solo_init(g.n(), VState::U), joint_init(g.n(), VState::U);
    std::vector<int> lab(g.n(), 0);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        solo_init[seeds[i]] = VState::R;
        joint_init[seeds[i]] = static_cast<int>(i) < L ? VState::B : VState::R;
        lab[seeds[i]] = static_cast<int>(i) + 1;
    }
    Labeller S(g, solo_init, lab), J(g, joint_init, lab);
    Rng rng(rng_seed);
    CoupledAttribution out;
    struct Upd {
        int v, ls, lj;
    };
    std::vector<Upd> pending;
    for_each_batch(g, sched, [&](const std::vector<int>& batch) {
        pending.clear();
        bool any = false;
        for (int v : batch) {
            bool cs = S.proc.is_candidate(v), cj = J.proc.is_candidate(v);
            if (cs != cj) ++out.violations;
            if (!cs && !cj) continue;
            any = true;
            double z = rng.uniform();
            int ls = 0, lj = 0;
            std::uint64_t idx = 0;
            bool drew = false;
            auto draw_index = [&](const Process& p) {
                if (!drew) {
                    idx = rng.below(p.red_count(v) + p.blue_count(v));
                    drew = true;
                }
                return idx;
            };
            if (cs) {
                auto [pr, pb] = S.proc.probs(dyn, v);
                if (z < pr + pb) ls = S.label[pick_infected(g, S.proc, v, draw_index(S.proc))];
            }
            if (cj) {
                auto [pr, pb] = J.proc.probs(dyn, v);
                if (z < pr + pb) lj = J.label[pick_infected(g, J.proc, v, draw_index(J.proc))];
            }
            if (ls != lj) ++out.violations;
            if (ls || lj) pending.push_back({v, ls, lj});
        }
        for (const auto& u : pending) {
            if (u.ls) {
                S.proc.infect(u.v, VState::R);
                S.label[u.v] = u.ls;
            }
            if (u.lj) {
                J.proc.infect(u.v, u.lj <= L ? VState::B : VState::R);
                J.label[u.v] = u.lj;
            }
        }
        return any;
    });
    out.solo = finish(S, static_cast<int>(seeds.size()));
    out.joint = finish(J, static_cast<int>(seeds.size()));
    for (int i = 0; i < L; ++i)
        if (out.solo.chi[i] != out.joint.chi[i]) ++out.violations;
    int joint_blue = 0;
    for (int i = 0; i < L; ++i) joint_blue += out.joint.chi[i];
    if (joint_blue != out.joint.chi_B) ++out.violations;
    out.invariant_ok = out.violations == 0;
    return out;
}

std::string to_string(CoupleMode m) {
    switch (m) {
        case CoupleMode::Lemma1:
            return "lemma1";
        case CoupleMode::Lemma2:
            return "lemma2";
        case CoupleMode::Lemma3:
            return "lemma3";
    }
    return "";
}

CoupleMode parse_couple_mode(const std::string& s) {
    if (s == "lemma1") return CoupleMode::Lemma1;
    if (s == "lemma2") return CoupleMode::Lemma2;
    if (s == "lemma3") return CoupleMode::Lemma3;
    throw ValidationError("mode", "unknown coupling mode '" + s + "' (lemma1, lemma2, lemma3)");
}

// Randomized test instances ----------------------------------------------------

namespace {

struct Instance {
    std::shared_ptr<Graph> graph;
    AdoptionFunction dyn;
    UpdateSchedule sched;
    Allocation A_R, A_B;
    std::vector<int> seeds;  // distinct Red seeds (attribution)
    int L = 1;
};

double uniform_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

std::vector<int> distinct_vertices(Rng& rng, int n, int k) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    for (int i = 0; i < k; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
    all.resize(k);
    return all;
}

Instance random_instance(Rng& rng, CoupleMode mode, int n_lo, int n_hi, double edge_p) {
    Instance in;
    int n = n_lo + static_cast<int>(rng.below(n_hi - n_lo + 1));
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (u != v && rng.uniform() < edge_p) edges.emplace_back(u, v);
    in.graph = std::make_shared<Graph>(n, true, edges);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    switch (rng.below(3)) {
        case 0:
            in.sched = SinglePassOrder{perm};
            break;
        case 1: {
            int layers = 2 + static_cast<int>(rng.below(3));
            std::vector<std::vector<int>> ls(layers);
            for (int v : perm) ls[rng.below(layers)].push_back(v);
            std::erase_if(ls, [](const auto& l) { return l.empty(); });
            for (auto& l : ls) std::sort(l.begin(), l.end());
            in.sched = LayerOrder{ls};
            break;
        }
        default:
            in.sched = ParallelRounds{1 + static_cast<int>(rng.below(3)), false};
    }
    double r, s;
    if (mode == CoupleMode::Lemma1) {
        r = uniform_in(rng, 0.3, 1.0);
        s = uniform_in(rng, r, 1.0);
    } else if (mode == CoupleMode::Lemma2) {
        r = uniform_in(rng, 0.3, 3.0);
        s = uniform_in(rng, 0.3, 4.0);
    } else {
        r = uniform_in(rng, 0.3, 3.0);
        s = 1.0;
    }
    in.dyn = AdoptionFunction::from_switch_select(SwitchingFunction::power(r), SelectionFunction::tullock(s));
    int kr = 1 + static_cast<int>(rng.below(std::min(3, n - 1)));
    int kb = 1 + static_cast<int>(rng.below(2));
    in.seeds = distinct_vertices(rng, n, kr);
    std::vector<int> bs = distinct_vertices(rng, n, kb);
    in.A_R = Allocation(n, in.seeds);
    in.A_B = Allocation(n, bs);
    in.L = 1 + static_cast<int>(rng.below(in.seeds.size()));
    return in;
}

GameSpec spec_of(const Instance& in) {
    GameSpec g;
    g.graph = in.graph;
    g.dyn = in.dyn;
    g.schedule = in.sched;
    return g;
}

std::int64_t pair_label(int r, int b, int n) { return static_cast<std::int64_t>(r) * (n + 1) + b; }

double sigma_margin(const MeanSe& lhs, const MeanSe& rhs) {
    double s = std::sqrt(lhs.se * lhs.se + rhs.se * rhs.se);
    double d = lhs.mean - rhs.mean;
    if (s == 0.0) return d >= 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return d / s;
}

void update_min(std::map<std::string, double>& m, const std::string& k, double v) {
    auto it = m.find(k);
    if (it == m.end())
        m[k] = v;
    else
        it->second = std::min(it->second, v);
}

}  // namespace

CoupleTestReport couple_test(const CoupleTestConfig& cfg) {
    if (cfg.runs < 1) throw ValidationError("runs", "must be at least 1");
    if (cfg.instances < 1) throw ValidationError("instances", "must be at least 1");
    CoupleTestReport rep;
    rep.mode = cfg.mode;
    rep.runs = cfg.runs;
    Rng rng(derive_seed(cfg.seed, 0xC0));

    // Per-step invariants over many randomized instances.
    std::vector<Instance> insts;
    for (int i = 0; i < cfg.instances; ++i) insts.push_back(random_instance(rng, cfg.mode, 4, 10, 0.35));
    std::vector<std::int64_t> viol(cfg.runs, 0);
    ExceptionSlot err;
#pragma omp parallel for schedule(dynamic, 64) num_threads(resolve_threads(cfg.threads))
    for (std::int64_t i = 0; i < cfg.runs; ++i)
        err.run([&] {
            const Instance& in = insts[i % cfg.instances];
            std::uint64_t s = derive_seed(cfg.seed, 1000 + i);
            if (cfg.mode == CoupleMode::Lemma1)
                viol[i] = coupled_solo_vs_joint(*in.graph, in.A_R, in.A_B, in.dyn, in.sched, s).violations;
            else if (cfg.mode == CoupleMode::Lemma2)
                viol[i] = coupled_joint_vs_solo_total(*in.graph, in.A_R, in.A_B, in.dyn, in.sched, s).violations;
            else
                viol[i] = coupled_attribution(*in.graph, in.seeds, in.L, in.dyn, in.sched, s).violations;
        });
    err.rethrow();
    rep.invariant_violations = std::accumulate(viol.begin(), viol.end(), std::int64_t{0});

    // Marginal faithfulness on one instance: coupled components against
    // independent plain runs.
    Instance probe = random_instance(rng, cfg.mode, 8, 8, 0.4);
    const Graph& pg = *probe.graph;
    int n = pg.n();
    std::vector<std::int64_t> cj(cfg.runs), cs(cfg.runs), pj(cfg.runs), ps(cfg.runs);
    Allocation none(n, {});
    Allocation lemma3_red, lemma3_blue;
    if (cfg.mode == CoupleMode::Lemma3) {
        std::vector<int> rs(probe.seeds.begin() + probe.L, probe.seeds.end());
        std::vector<int> bs(probe.seeds.begin(), probe.seeds.begin() + probe.L);
        lemma3_red = Allocation(n, rs);
        lemma3_blue = Allocation(n, bs);
    }
#pragma omp parallel for schedule(dynamic, 64) num_threads(resolve_threads(cfg.threads))
    for (std::int64_t i = 0; i < cfg.runs; ++i)
        err.run([&] {
            std::uint64_t s1 = derive_seed(cfg.seed ^ 0x5a5a5a5aULL, i);
            std::uint64_t s2 = derive_seed(cfg.seed ^ 0xa5a5a5a5ULL, i);
            std::uint64_t s3 = derive_seed(cfg.seed ^ 0x3c3c3c3cULL, i);
            if (cfg.mode == CoupleMode::Lemma3) {
                auto c = coupled_attribution(pg, probe.seeds, probe.L, probe.dyn, probe.sched, s1);
                cj[i] = pair_label(c.joint.chi_R, c.joint.chi_B, n);
                cs[i] = c.solo.chi_R;
                Rng r2(s2);
                auto jo = run_contagion(pg, resolve_contested_seeds(lemma3_red, lemma3_blue, r2), probe.dyn,
                                        probe.sched, r2.next());
                pj[i] = pair_label(jo.chi_R, jo.chi_B, n);
            } else {
                auto c = cfg.mode == CoupleMode::Lemma1
                             ? coupled_solo_vs_joint(pg, probe.A_R, probe.A_B, probe.dyn, probe.sched, s1)
                             : coupled_joint_vs_solo_total(pg, probe.A_R, probe.A_B, probe.dyn, probe.sched, s1);
                cj[i] = pair_label(c.joint.chi_R, c.joint.chi_B, n);
                cs[i] = c.solo.chi_R;
                Rng r2(s2);
                auto jo = run_contagion(pg, resolve_contested_seeds(probe.A_R, probe.A_B, r2), probe.dyn, probe.sched,
                                        r2.next());
                pj[i] = pair_label(jo.chi_R, jo.chi_B, n);
            }
            Rng r3(s3);
            const Allocation& solo_red = cfg.mode == CoupleMode::Lemma3 ? Allocation(n, probe.seeds) : probe.A_R;
            auto so = run_contagion(pg, resolve_contested_seeds(solo_red, none, r3), probe.dyn, probe.sched, r3.next());
            ps[i] = so.chi_R;
        });
    err.rethrow();
    rep.p_values["joint_marginal"] = chi_square_two_sample(cj, pj).p_value;
    rep.p_values["solo_marginal"] = chi_square_two_sample(cs, ps).p_value;

    // Expectation inequalities, exactly on enumerable instances.
    ExactOptions eo;
    eo.max_nodes = 1 << 20;
    for (int k = 0; k < cfg.exact_instances; ++k) {
        Instance in = random_instance(rng, cfg.mode, 4, 8, 0.35);
        GameSpec g = spec_of(in);
        Allocation empty(g.graph->n(), {});
        try {
            if (cfg.mode == CoupleMode::Lemma3) {
                std::vector<int> rs(in.seeds.begin() + in.L, in.seeds.end());
                std::vector<int> bs(in.seeds.begin(), in.seeds.begin() + in.L);
                double uncontested = exact_pure_payoffs(g, Allocation(g.graph->n(), rs), Allocation(g.graph->n(), bs), eo).second;
                double contested =
                    exact_pure_payoffs(g, Allocation(g.graph->n(), in.seeds), Allocation(g.graph->n(), bs), eo).second;
                update_min(rep.inequality_margins, "lemma3_contested_exact", contested - 0.5 * uncontested);
            } else {
                auto joint = exact_pure_payoffs(g, in.A_R, in.A_B, eo);
                double solo_r = exact_pure_payoffs(g, in.A_R, empty, eo).first;
                double solo_b = exact_pure_payoffs(g, empty, in.A_B, eo).second;
                if (cfg.mode == CoupleMode::Lemma1) {
                    update_min(rep.inequality_margins, "lemma1_exact", solo_r - joint.first);
                    update_min(rep.inequality_margins, "corollary1_exact",
                               solo_r + solo_b - joint.first - joint.second);
                } else {
                    update_min(rep.inequality_margins, "lemma2_exact", joint.first + joint.second - solo_r);
                }
            }
        } catch (const CapExceeded&) {
            continue;
        }
    }

    // Sampled versions on a larger instance, in units of sigma.
    Instance big = random_instance(rng, cfg.mode, 24, 24, 0.12);
    const Graph& bg = *big.graph;
    std::int64_t m = cfg.runs;
    std::vector<double> j_total(m), j_red(m), s_red(m), s_blue(m), lab_sum(m), j_blue(m);
    Allocation bnone(bg.n(), {});
    std::vector<int> brs(big.seeds.begin() + big.L, big.seeds.end());
    std::vector<int> bbs(big.seeds.begin(), big.seeds.begin() + big.L);
    Allocation l3_red(bg.n(), brs), l3_blue(bg.n(), bbs);
#pragma omp parallel for schedule(dynamic, 64) num_threads(resolve_threads(cfg.threads))
    for (std::int64_t i = 0; i < m; ++i)
        err.run([&] {
            Rng a(derive_seed(cfg.seed ^ 0x1111ULL, i)), b(derive_seed(cfg.seed ^ 0x2222ULL, i)),
                c(derive_seed(cfg.seed ^ 0x3333ULL, i));
            if (cfg.mode == CoupleMode::Lemma3) {
                auto jo = run_contagion(bg, resolve_contested_seeds(l3_red, l3_blue, a), big.dyn, big.sched, a.next());
                j_blue[i] = jo.chi_B;
                auto lab = attribution_run(bg, big.seeds, big.dyn, big.sched, b.next());
                double s = 0.0;
                for (int k = 0; k < big.L; ++k) s += lab.chi[k];
                lab_sum[i] = s;
                return;
            }
            auto jo = run_contagion(bg, resolve_contested_seeds(big.A_R, big.A_B, a), big.dyn, big.sched, a.next());
            j_total[i] = jo.chi_R + jo.chi_B;
            j_red[i] = jo.chi_R;
            auto so = run_contagion(bg, resolve_contested_seeds(big.A_R, bnone, b), big.dyn, big.sched, b.next());
            s_red[i] = so.chi_R;
            auto sb = run_contagion(bg, resolve_contested_seeds(bnone, big.A_B, c), big.dyn, big.sched, c.next());
            s_blue[i] = sb.chi_B;
        });
    err.rethrow();
    if (cfg.mode == CoupleMode::Lemma3) {
        rep.inequality_margins["lemma3_sampled_sigma"] = sigma_margin(mean_se(j_blue), mean_se(lab_sum));
    } else if (cfg.mode == CoupleMode::Lemma1) {
        rep.inequality_margins["lemma1_sampled_sigma"] = sigma_margin(mean_se(s_red), mean_se(j_red));
        std::vector<double> sum(m);
        for (std::int64_t i = 0; i < m; ++i) sum[i] = s_red[i] + s_blue[i];
        rep.inequality_margins["corollary1_sampled_sigma"] = sigma_margin(mean_se(sum), mean_se(j_total));
    } else {
        rep.inequality_margins["lemma2_sampled_sigma"] = sigma_margin(mean_se(j_total), mean_se(s_red));
    }

    rep.passed = rep.invariant_violations == 0;
    for (const auto& [k, p] : rep.p_values) rep.passed &= p >= 1e-3;
    for (const auto& [k, v] : rep.inequality_margins) {
        bool sampled = k.find("sigma") != std::string::npos;
        rep.passed &= sampled ? v >= -3.0 : v >= -1e-9;
    }
    return rep;
}

}  // namespace contagion
