#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "contagion/dynamics.hpp"
#include "contagion/graph.hpp"

namespace contagion {

struct SinglePassOrder {
    std::vector<int> order;
};
struct ParallelRounds {
    int max_rounds = 1;
    bool immunity = false;
};
struct RandomSequential {
    std::int64_t max_steps = 1;
};
struct LayerOrder {
    std::vector<std::vector<int>> layers;
};

using UpdateSchedule = std::variant<SinglePassOrder, ParallelRounds, RandomSequential, LayerOrder>;

// Throws ValidationError for unknown or repeated vertices.
void validate_schedule(const Graph& g, const UpdateSchedule& sched);

// Deterministic schedules as a sequence of simultaneous batches. Parallel
// rounds become max_rounds copies of the full vertex set. Empty for
// RandomSequential.
std::vector<std::vector<int>> schedule_batches(const Graph& g, const UpdateSchedule& sched);

bool has_immunity(const UpdateSchedule& sched);

struct StepEvent {
    std::int64_t step;
    int vertex;
    VState to;
};

struct SimOutcome {
    StateVector state;
    int chi_R = 0;
    int chi_B = 0;
    std::vector<StepEvent> trace;
};

struct RunOptions {
    bool record_trace = false;
};

SimOutcome run_contagion(const Graph& g, const StateVector& initial, const AdoptionFunction& dyn,
                         const UpdateSchedule& sched, std::uint64_t rng_seed, const RunOptions& opts = {});

}  // namespace contagion

namespace contagion::detail {
// run_contagion without schedule validation, for callers that validated once.
SimOutcome run_unchecked(const Graph& g, const StateVector& initial, const AdoptionFunction& dyn,
                         const UpdateSchedule& sched, std::uint64_t rng_seed, const RunOptions& opts = {});
}  // namespace contagion::detail
