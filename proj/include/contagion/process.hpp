#pragma once

#include <vector>

#include "contagion/dynamics.hpp"
#include "contagion/graph.hpp"

namespace contagion {

// Mutable per-run state with incrementally maintained infected-neighbour
// counts. Shared by plain runs and the coupling harness.
class Process {
public:
    Process(const Graph& g, const StateVector& initial);

    const Graph& graph() const { return *g_; }
    VState state(int v) const { return state_[v]; }
    const StateVector& states() const { return state_; }
    bool immune(int v) const { return immune_[v]; }
    void make_immune(int v) { immune_[v] = 1; }
    int red_count(int v) const { return cr_[v]; }
    int blue_count(int v) const { return cb_[v]; }
    int chi_R() const { return chi_r_; }
    int chi_B() const { return chi_b_; }

    bool is_candidate(int v) const {
        return state_[v] == VState::U && !immune_[v] && cr_[v] + cb_[v] > 0;
    }
    std::pair<double, double> probs(const AdoptionFunction& h, int v) const {
        return h.probs(cr_[v], cb_[v], g_->in_degree(v));
    }
    void infect(int v, VState c);

private:
    const Graph* g_;
    StateVector state_;
    std::vector<int> cr_, cb_;
    std::vector<char> immune_;
    int chi_r_ = 0, chi_b_ = 0;
};

}  // namespace contagion
