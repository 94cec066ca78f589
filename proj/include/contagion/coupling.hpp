#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "contagion/game.hpp"
#include "contagion/schedule.hpp"

namespace contagion {

struct CoupledOutcome {
    SimOutcome joint;  // X: both players seeded
    SimOutcome solo;   // Y: Red alone
    bool invariant_ok = true;
    int violations = 0;  // (vertex, step) pairs breaking the invariant
};

// Throws ValidationError for schedules without a step-for-step alignment
// (immunity, random sequential).
void require_coupling_schedule(const UpdateSchedule& sched);

// Invariant: X_v = R implies Y_v = R. Requires competitive, additive h
// with nondecreasing total infection probability.
CoupledOutcome coupled_solo_vs_joint(const Graph& g, const Allocation& A_R, const Allocation& A_B,
                                     const AdoptionFunction& dyn, const UpdateSchedule& sched, std::uint64_t rng_seed);

// Invariant: Y_v = R implies X_v in {R, B}. Requires additive h with
// nondecreasing total infection probability.
CoupledOutcome coupled_joint_vs_solo_total(const Graph& g, const Allocation& A_R, const Allocation& A_B,
                                           const AdoptionFunction& dyn, const UpdateSchedule& sched,
                                           std::uint64_t rng_seed);

struct LabelledOutcome {
    std::vector<int> label;  // 0 for U, i + 1 for an infection traced to seed i
    std::vector<int> chi;    // chi[i] counts label i + 1
    int chi_R = 0;
    int chi_B = 0;
};

// Solo Red run in which each infection copies the label of a uniformly
// chosen infected in-neighbour. Seeds are distinct vertices.
LabelledOutcome attribution_run(const Graph& g, const std::vector<int>& seeds, const AdoptionFunction& dyn,
                                const UpdateSchedule& sched, std::uint64_t rng_seed);

struct CoupledAttribution {
    LabelledOutcome solo;   // (S_R, empty)
    LabelledOutcome joint;  // first L seeds switched to Blue
    bool invariant_ok = true;
    int violations = 0;
};

// Requires additive h with linear implied selection and h(0, b) = 0.
CoupledAttribution coupled_attribution(const Graph& g, const std::vector<int>& seeds, int L,
                                       const AdoptionFunction& dyn, const UpdateSchedule& sched,
                                       std::uint64_t rng_seed);

// Hypothesis checks used by the harness; throw HypothesisError.
void require_lemma1_hypotheses(const AdoptionFunction& dyn, const Graph& g);
void require_lemma2_hypotheses(const AdoptionFunction& dyn, const Graph& g);
void require_attribution_hypotheses(const AdoptionFunction& dyn, const Graph& g);

enum class CoupleMode { Lemma1, Lemma2, Lemma3 };
std::string to_string(CoupleMode m);
CoupleMode parse_couple_mode(const std::string& s);

struct CoupleTestConfig {
    CoupleMode mode = CoupleMode::Lemma1;
    std::int64_t runs = 10000;
    std::uint64_t seed = 1;
    int instances = 50;      // randomized small instances for invariant runs
    int exact_instances = 40;
    int threads = 0;
};

struct CoupleTestReport {
    CoupleMode mode = CoupleMode::Lemma1;
    std::int64_t runs = 0;
    std::int64_t invariant_violations = 0;
    // Named inequality margins: exact checks report min(lhs - rhs); sampled
    // checks report (lhs - rhs) / sigma.
    std::map<std::string, double> inequality_margins;
    std::map<std::string, double> p_values;
    bool passed = false;
};

// Randomized coupled runs, marginal-faithfulness tests at significance 1e-3,
// and the expectation inequalities (exact on enumerable instances, 3 sigma on
// a sampled one).
CoupleTestReport couple_test(const CoupleTestConfig& cfg);

}  // namespace contagion
