#include "contagion/symmetry.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "contagion/errors.hpp"
#include "contagion/layered.hpp"

namespace contagion {

SymmetryClasses SymmetryClasses::singletons(int n) {
    SymmetryClasses c;
    c.class_of.resize(n);
    std::iota(c.class_of.begin(), c.class_of.end(), 0);
    for (int v = 0; v < n; ++v) c.members.push_back({v});
    return c;
}

namespace {

SymmetryClasses from_groups(int n, std::vector<std::vector<int>> groups) {
    for (auto& m : groups) std::sort(m.begin(), m.end());
    std::sort(groups.begin(), groups.end());
    SymmetryClasses c;
    c.class_of.assign(n, -1);
    c.members = std::move(groups);
    for (std::size_t i = 0; i < c.members.size(); ++i)
        for (int v : c.members[i]) c.class_of[v] = static_cast<int>(i);
    return c;
}

}  // namespace

SymmetryClasses twin_classes(const Graph& g, const UpdateSchedule& sched) {
    const int n = g.n();
    std::vector<int> position(n, -1);
    bool ordered = false;
    if (auto* s = std::get_if<SinglePassOrder>(&sched)) {
        ordered = true;
        for (std::size_t i = 0; i < s->order.size(); ++i) position[s->order[i]] = static_cast<int>(i);
    } else if (auto* l = std::get_if<LayerOrder>(&sched)) {
        for (std::size_t i = 0; i < l->layers.size(); ++i)
            for (int v : l->layers[i]) position[v] = static_cast<int>(i);
    } else {
        std::fill(position.begin(), position.end(), 0);
    }
    // A vertex without in-neighbours never updates, so its position is moot.
    for (int v = 0; v < n; ++v)
        if (g.in_degree(v) == 0) position[v] = -1;

    using Key = std::tuple<std::vector<int>, std::vector<int>, int>;
    std::map<Key, std::vector<int>> groups;
    for (int v = 0; v < n; ++v) {
        auto in = g.in_neighbors(v);
        auto out = g.out_neighbors(v);
        int slot = ordered ? (position[v] >= 0 ? 0 : -1) : position[v];
        groups[Key{std::vector<int>(in.begin(), in.end()), std::vector<int>(out.begin(), out.end()), slot}].push_back(v);
    }
    std::vector<std::vector<int>> out;
    for (auto& [key, members] : groups) {
        if (!ordered || std::get<2>(key) < 0 || members.size() == 1) {
            out.push_back(std::move(members));
            continue;
        }
        // Under a single pass, twins may swap only when no updated neighbour
        // sits between them in the order.
        std::vector<int> nbr_pos;
        for (int w : std::get<0>(key))
            if (position[w] >= 0) nbr_pos.push_back(position[w]);
        for (int w : std::get<1>(key))
            if (position[w] >= 0) nbr_pos.push_back(position[w]);
        std::sort(nbr_pos.begin(), nbr_pos.end());
        std::sort(members.begin(), members.end(), [&](int a, int b) { return position[a] < position[b]; });
        auto segment = [&](int v) {
            return std::lower_bound(nbr_pos.begin(), nbr_pos.end(), position[v]) - nbr_pos.begin();
        };
        std::vector<int> cur{members[0]};
        for (std::size_t i = 1; i < members.size(); ++i) {
            if (segment(members[i]) != segment(cur.back())) {
                out.push_back(std::move(cur));
                cur.clear();
            }
            cur.push_back(members[i]);
        }
        out.push_back(std::move(cur));
    }
    return from_groups(n, std::move(out));
}

SymmetryClasses layer_classes(const LayeredGame& game) {
    std::vector<std::vector<int>> groups;
    int base = 0;
    for (const auto& c : game.components)
        for (int s : c) {
            groups.emplace_back(s);
            std::iota(groups.back().begin(), groups.back().end(), base);
            base += s;
        }
    return from_groups(base, std::move(groups));
}

SymmetryClasses refine(const SymmetryClasses& c, const Allocation& a) {
    std::vector<std::vector<int>> groups;
    for (const auto& m : c.members) {
        std::map<int, std::vector<int>> by_count;
        bool any = false;
        for (int v : m)
            if (a.count(v)) {
                any = true;
                break;
            }
        if (!any) {
            groups.push_back(m);
            continue;
        }
        for (int v : m) by_count[a.count(v)].push_back(v);
        for (auto& [k, vs] : by_count) groups.push_back(std::move(vs));
    }
    return from_groups(c.n(), std::move(groups));
}

namespace {

// Partitions of c into at most m parts, parts descending.
void partitions(int c, int m, int max_part, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (c == 0) {
        out.push_back(cur);
        return;
    }
    if (m == 0) return;
    for (int p = std::min(c, max_part); p >= 1; --p) {
        cur.push_back(p);
        partitions(c - p, m - 1, p, cur, out);
        cur.pop_back();
    }
}

std::uint64_t partition_count(int c, int m) {
    std::vector<int> cur;
    std::vector<std::vector<int>> out;
    partitions(c, m, c, cur, out);
    return out.size();
}

}  // namespace

std::uint64_t count_representatives(const SymmetryClasses& c, int K) {
    if (K < 0) return 0;
    std::vector<std::uint64_t> ways(K + 1, 0);
    ways[0] = 1;
    std::map<int, std::vector<std::uint64_t>> table;  // by class size
    constexpr std::uint64_t kSat = std::uint64_t{1} << 62;
    for (const auto& m : c.members) {
        int size = std::min<int>(static_cast<int>(m.size()), K);
        auto& pc = table[size];
        if (pc.empty())
            for (int k = 0; k <= K; ++k) pc.push_back(partition_count(k, size));
        std::vector<std::uint64_t> next(K + 1, 0);
        for (int a = 0; a <= K; ++a) {
            if (!ways[a]) continue;
            for (int k = 0; a + k <= K; ++k) next[a + k] = std::min(kSat, next[a + k] + std::min(kSat / (pc[k] + 1), ways[a]) * pc[k]);
        }
        ways.swap(next);
    }
    return ways[K];
}

std::vector<Allocation> orbit_representatives(const SymmetryClasses& c, int K, std::uint64_t cap) {
    std::uint64_t total = count_representatives(c, K);
    if (total > cap)
        throw CapExceeded("allocation space has " + std::to_string(total) + " representatives (cap " +
                          std::to_string(cap) + ")");
    std::vector<Allocation> out;
    out.reserve(total);
    std::vector<int> seeds;
    const int nc = static_cast<int>(c.members.size());
    std::map<std::pair<int, int>, std::vector<std::vector<int>>> parts_cache;
    auto parts_of = [&](int k, int m) -> const std::vector<std::vector<int>>& {
        auto key = std::make_pair(k, std::min(m, k));
        auto it = parts_cache.find(key);
        if (it == parts_cache.end()) {
            std::vector<int> cur;
            std::vector<std::vector<int>> ps;
            partitions(k, key.second, k, cur, ps);
            it = parts_cache.emplace(key, std::move(ps)).first;
        }
        return it->second;
    };
    // Depth-first over classes; the remaining budget is spread over later
    // classes.
    auto rec = [&](auto&& self, int ci, int left) -> void {
        if (left == 0) {
            out.emplace_back(c.n(), seeds);
            return;
        }
        if (ci == nc) return;
        for (int k = left; k >= 0; --k) {
            if (k == 0) {
                self(self, ci + 1, left);
                continue;
            }
            for (const auto& parts : parts_of(k, static_cast<int>(c.members[ci].size()))) {
                std::size_t mark = seeds.size();
                for (std::size_t j = 0; j < parts.size(); ++j) seeds.insert(seeds.end(), parts[j], c.members[ci][j]);
                self(self, ci + 1, left - k);
                seeds.resize(mark);
            }
        }
    };
    rec(rec, 0, K);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> canonical_profile_key(const SymmetryClasses& c, const Allocation& red, const Allocation& blue) {
    std::map<int, std::vector<std::pair<int, int>>> per_class;
    for (auto [v, k] : red.support()) per_class[c.class_of[v]].push_back({k, blue.count(v)});
    for (auto [v, k] : blue.support())
        if (red.count(v) == 0) per_class[c.class_of[v]].push_back({0, k});
    std::vector<int> key;
    for (auto& [cls, pairs] : per_class) {
        std::sort(pairs.rbegin(), pairs.rend());
        key.push_back(cls);
        key.push_back(static_cast<int>(pairs.size()));
        for (auto [r, b] : pairs) {
            key.push_back(r);
            key.push_back(b);
        }
    }
    return key;
}

}  // namespace contagion
