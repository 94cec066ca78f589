#pragma once

#include <cstdint>
#include <vector>

#include "contagion/game.hpp"
#include "contagion/graph.hpp"
#include "contagion/schedule.hpp"

namespace contagion {

struct LayeredGame;

// A partition of the vertices into classes whose members can be permuted
// freely without changing the game (payoffs are invariant under any
// permutation within classes).
struct SymmetryClasses {
    std::vector<int> class_of;
    std::vector<std::vector<int>> members;  // each sorted ascending

    static SymmetryClasses singletons(int n);
    int n() const { return static_cast<int>(class_of.size()); }
};

// Twins share in-set and out-set, and their schedule positions are
// interchangeable.
SymmetryClasses twin_classes(const Graph& g, const UpdateSchedule& sched);
// Each layer of a layered game is one class.
SymmetryClasses layer_classes(const LayeredGame& game);

// Splits each class by the seed count an allocation places on its members
// (the stabiliser of that allocation).
SymmetryClasses refine(const SymmetryClasses& c, const Allocation& a);

// Number of orbit representatives of K-seed allocations.
std::uint64_t count_representatives(const SymmetryClasses& c, int K);

// One allocation per orbit, each the lexicographically smallest member of
// its orbit, listed in lexicographic order of seed lists. Throws CapExceeded
// when more than cap representatives exist.
std::vector<Allocation> orbit_representatives(const SymmetryClasses& c, int K, std::uint64_t cap);

// Key identifying the joint orbit of a profile.
std::vector<int> canonical_profile_key(const SymmetryClasses& c, const Allocation& red, const Allocation& blue);

}  // namespace contagion
