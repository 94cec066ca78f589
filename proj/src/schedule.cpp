#include <algorithm>
#include <numeric>

#include "contagion/errors.hpp"
#include "contagion/process.hpp"
#include "contagion/rng.hpp"
#include "contagion/schedule.hpp"

namespace contagion {

Process::Process(const Graph& g, const StateVector& initial)
    : g_(&g), state_(g.n(), VState::U), cr_(g.n(), 0), cb_(g.n(), 0), immune_(g.n(), 0) {
    if (initial.size() != static_cast<std::size_t>(g.n()))
        throw ValidationError("initial", "state vector length differs from vertex count");
    for (int v = 0; v < g.n(); ++v)
        if (initial[v] != VState::U) infect(v, initial[v]);
}

void Process::infect(int v, VState c) {
    state_[v] = c;
    auto& cnt = c == VState::R ? cr_ : cb_;
    (c == VState::R ? chi_r_ : chi_b_)++;
    for (int w : g_->out_neighbors(v)) ++cnt[w];
}

void validate_schedule(const Graph& g, const UpdateSchedule& sched) {
    auto check_ids = [&](const std::vector<int>& vs, std::vector<char>& seen, const char* field) {
        for (int v : vs) {
            if (v < 0 || v >= g.n()) throw ValidationError(field, "unknown vertex " + std::to_string(v));
            if (seen[v]) throw ValidationError(field, "vertex " + std::to_string(v) + " listed twice");
            seen[v] = 1;
        }
    };
    std::vector<char> seen(g.n(), 0);
    if (auto* s = std::get_if<SinglePassOrder>(&sched)) {
        check_ids(s->order, seen, "schedule.order");
    } else if (auto* l = std::get_if<LayerOrder>(&sched)) {
        for (const auto& layer : l->layers) check_ids(layer, seen, "schedule.layers");
    } else if (auto* p = std::get_if<ParallelRounds>(&sched)) {
        if (p->max_rounds < 1) throw ValidationError("schedule.max_rounds", "must be positive");
    } else if (auto* r = std::get_if<RandomSequential>(&sched)) {
        if (r->max_steps < 1) throw ValidationError("schedule.max_steps", "must be positive");
    }
}

std::vector<std::vector<int>> schedule_batches(const Graph& g, const UpdateSchedule& sched) {
    std::vector<std::vector<int>> out;
    if (auto* s = std::get_if<SinglePassOrder>(&sched)) {
        for (int v : s->order) out.push_back({v});
    } else if (auto* l = std::get_if<LayerOrder>(&sched)) {
        out = l->layers;
    } else if (auto* p = std::get_if<ParallelRounds>(&sched)) {
        std::vector<int> all(g.n());
        std::iota(all.begin(), all.end(), 0);
        out.assign(p->max_rounds, all);
    }
    return out;
}

bool has_immunity(const UpdateSchedule& sched) {
    auto* p = std::get_if<ParallelRounds>(&sched);
    return p && p->immunity;
}

namespace {

// Outcome of one update from a uniform draw; draws only when uncertain.
VState decide(double pr, double pb, Rng& rng) {
    if (pr + pb <= 0.0) return VState::U;
    if (pr >= 1.0) return VState::R;
    if (pb >= 1.0) return VState::B;
    double z = rng.uniform();
    if (z < pr) return VState::R;
    if (z < pr + pb) return VState::B;
    return VState::U;
}

struct Pending {
    int v;
    VState to;
};

// Updates all candidates of a batch from the pre-batch snapshot.
bool run_batch(Process& proc, const std::vector<int>& batch, const AdoptionFunction& dyn, bool immunity, Rng& rng,
               std::vector<Pending>& pending, std::int64_t step, SimOutcome& out, bool trace) {
    pending.clear();
    bool any = false;
    for (int v : batch) {
        if (!proc.is_candidate(v)) continue;
        any = true;
        auto [pr, pb] = proc.probs(dyn, v);
        pending.push_back({v, decide(pr, pb, rng)});
    }
    for (const auto& p : pending) {
        if (p.to == VState::U) {
            if (immunity) proc.make_immune(p.v);
            continue;
        }
        proc.infect(p.v, p.to);
        if (trace) out.trace.push_back({step, p.v, p.to});
    }
    return any;
}

}  // namespace

SimOutcome run_contagion(const Graph& g, const StateVector& initial, const AdoptionFunction& dyn,
                         const UpdateSchedule& sched, std::uint64_t rng_seed, const RunOptions& opts) {
    validate_schedule(g, sched);
    return detail::run_unchecked(g, initial, dyn, sched, rng_seed, opts);
}

SimOutcome detail::run_unchecked(const Graph& g, const StateVector& initial, const AdoptionFunction& dyn,
                                 const UpdateSchedule& sched, std::uint64_t rng_seed, const RunOptions& opts) {
    Process proc(g, initial);
    Rng rng(rng_seed);
    SimOutcome out;
    std::vector<Pending> pending;
    std::vector<int> single(1);

    if (auto* s = std::get_if<SinglePassOrder>(&sched)) {
        std::int64_t step = 0;
        for (int v : s->order) {
            single[0] = v;
            run_batch(proc, single, dyn, false, rng, pending, step++, out, opts.record_trace);
        }
    } else if (auto* l = std::get_if<LayerOrder>(&sched)) {
        std::int64_t step = 0;
        for (const auto& layer : l->layers) run_batch(proc, layer, dyn, false, rng, pending, step++, out, opts.record_trace);
    } else if (auto* p = std::get_if<ParallelRounds>(&sched)) {
        std::vector<int> all(g.n());
        std::iota(all.begin(), all.end(), 0);
        for (int round = 0; round < p->max_rounds; ++round)
            if (!run_batch(proc, all, dyn, p->immunity, rng, pending, round, out, opts.record_trace)) break;
    } else if (auto* r = std::get_if<RandomSequential>(&sched)) {
        std::vector<int> cand, pos(g.n(), -1);
        auto add = [&](int v) {
            if (pos[v] < 0 && proc.is_candidate(v)) {
                pos[v] = static_cast<int>(cand.size());
                cand.push_back(v);
            }
        };
        for (int v = 0; v < g.n(); ++v) add(v);
        for (std::int64_t step = 0; step < r->max_steps && !cand.empty(); ++step) {
            int v = cand[rng.below(cand.size())];
            auto [pr, pb] = proc.probs(dyn, v);
            VState to = decide(pr, pb, rng);
            if (to == VState::U) continue;
            proc.infect(v, to);
            if (opts.record_trace) out.trace.push_back({step, v, to});
            int last = cand.back();
            cand[pos[v]] = last;
            pos[last] = pos[v];
            cand.pop_back();
            pos[v] = -1;
            for (int w : g.out_neighbors(v)) add(w);
        }
    }
    out.state = proc.states();
    out.chi_R = proc.chi_R();
    out.chi_B = proc.chi_B();
    return out;
}

}  // namespace contagion
