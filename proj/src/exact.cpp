#include <algorithm>
#include <string>
#include <unordered_map>

#include "contagion/errors.hpp"
#include "contagion/game.hpp"

namespace contagion {

namespace {

constexpr std::uint8_t kU = 0, kR = 1, kB = 2, kImmune = 3;

struct Budget {
    std::int64_t used = 0;
    std::int64_t max;
    void tick() {
        if (++used > max) throw CapExceeded("exact oracle exceeded " + std::to_string(max) + " nodes");
    }
};

// Event-tree expectation for one connected block of uninfected vertices.
class BlockSolver {
public:
    BlockSolver(const Graph& g, const AdoptionFunction& dyn, bool immunity, bool repeating, int rounds,
                std::vector<int> verts, const std::vector<int>& local_of, const std::vector<int>& batch_of, Budget& budget)
        : dyn_(dyn), immunity_(immunity), repeating_(repeating), budget_(budget), verts_(std::move(verts)) {
        int nc = static_cast<int>(verts_.size());
        deg_.resize(nc);
        out_.resize(nc);
        for (int i = 0; i < nc; ++i) {
            int v = verts_[i];
            deg_[i] = g.in_degree(v);
            for (int w : g.out_neighbors(v))
                if (local_of[w] >= 0) out_[i].push_back(local_of[w]);
        }
        if (repeating_) {
            batches_.assign(rounds, {});
            for (auto& b : batches_)
                for (int i = 0; i < nc; ++i) b.push_back(i);
            last_.assign(nc, rounds - 1);
        } else {
            std::vector<std::pair<int, int>> order;
            for (int i = 0; i < nc; ++i) order.emplace_back(batch_of[verts_[i]], i);
            std::sort(order.begin(), order.end());
            last_.assign(nc, 0);
            for (std::size_t j = 0; j < order.size(); ++j) {
                if (j == 0 || order[j].first != order[j - 1].first) batches_.emplace_back();
                batches_.back().push_back(order[j].second);
                last_[order[j].second] = static_cast<int>(batches_.size()) - 1;
            }
        }
        st_.assign(nc, kU);
        cr_.assign(nc, 0);
        cb_.assign(nc, 0);
    }

    int size() const { return static_cast<int>(verts_.size()); }
    int global(int i) const { return verts_[i]; }

    // Expected (Red, Blue) infections inside the block given base counts
    // from infected vertices outside it.
    std::pair<double, double> solve(const std::vector<int>& base_r, const std::vector<int>& base_b) {
        cr_ = base_r;
        cb_ = base_b;
        std::fill(st_.begin(), st_.end(), kU);
        memo_.clear();
        return dfs(0);
    }

private:
    struct Cand {
        int v;
        double pr, pb;
    };

    void apply(int v, std::uint8_t to) {
        st_[v] = to;
        if (to == kR)
            for (int w : out_[v]) ++cr_[w];
        else if (to == kB)
            for (int w : out_[v]) ++cb_[w];
    }
    void undo(int v, std::uint8_t from) {
        if (from == kR)
            for (int w : out_[v]) --cr_[w];
        else if (from == kB)
            for (int w : out_[v]) --cb_[w];
        st_[v] = kU;
    }

    bool is_sink(int v, int k) const {
        if (last_[v] > k) return false;
        for (int w : out_[v])
            if (st_[w] == kU && last_[w] > k) return false;
        return true;
    }

    std::pair<double, double> dfs(int k) {
        while (k < static_cast<int>(batches_.size())) {
            bool any = false;
            for (int v : batches_[k])
                if (st_[v] == kU && cr_[v] + cb_[v] > 0) {
                    any = true;
                    break;
                }
            if (any) break;
            if (repeating_) return {0.0, 0.0};
            ++k;
        }
        if (k >= static_cast<int>(batches_.size())) return {0.0, 0.0};
        budget_.tick();

        std::string key(reinterpret_cast<const char*>(st_.data()), st_.size());
        key.append(reinterpret_cast<const char*>(&k), sizeof(k));
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;

        double er = 0.0, eb = 0.0;
        std::vector<std::pair<int, std::uint8_t>> fixed;
        std::vector<Cand> branch;
        for (int v : batches_[k]) {
            if (st_[v] != kU || cr_[v] + cb_[v] == 0) continue;
            auto [pr, pb] = dyn_.probs(cr_[v], cb_[v], deg_[v]);
            if (is_sink(v, k)) {
                er += pr;
                eb += pb;
            } else if (pr >= 1.0) {
                fixed.emplace_back(v, kR);
            } else if (pb >= 1.0) {
                fixed.emplace_back(v, kB);
            } else if (pr + pb <= 0.0) {
                if (immunity_) fixed.emplace_back(v, kImmune);
            } else {
                branch.push_back({v, pr, pb});
            }
        }
        for (auto [v, to] : fixed) {
            if (to == kR) er += 1.0;
            if (to == kB) eb += 1.0;
        }
        auto [br, bb] = expand(branch, 0, fixed, k);
        er += br;
        eb += bb;
        memo_.emplace(std::move(key), std::make_pair(er, eb));
        return {er, eb};
    }

    // Sums over the joint outcomes of the branching candidates, applying all
    // updates of the batch at once.
    std::pair<double, double> expand(const std::vector<Cand>& branch, std::size_t j,
                                     std::vector<std::pair<int, std::uint8_t>>& fixed, int k) {
        if (j == branch.size()) {
            budget_.tick();
            for (auto [v, to] : fixed) apply(v, to);
            auto res = dfs(k + 1);
            for (auto it = fixed.rbegin(); it != fixed.rend(); ++it) undo(it->first, it->second);
            return res;
        }
        const Cand& c = branch[j];
        double pu = std::max(0.0, 1.0 - c.pr - c.pb);
        double er = 0.0, eb = 0.0;
        const std::pair<std::uint8_t, double> outcomes[3] = {{kR, c.pr}, {kB, c.pb}, {immunity_ ? kImmune : kU, pu}};
        for (auto [to, p] : outcomes) {
            if (p <= 0.0) continue;
            fixed.emplace_back(c.v, to);
            auto [r, b] = expand(branch, j + 1, fixed, k);
            fixed.pop_back();
            er += p * (r + (to == kR));
            eb += p * (b + (to == kB));
        }
        return {er, eb};
    }

    const AdoptionFunction& dyn_;
    bool immunity_, repeating_;
    Budget& budget_;
    std::vector<int> verts_, deg_, last_;
    std::vector<std::vector<int>> out_, batches_;
    std::vector<std::uint8_t> st_;
    std::vector<int> cr_, cb_;
    std::unordered_map<std::string, std::pair<double, double>> memo_;
};

}  // namespace

std::pair<double, double> exact_pure_payoffs(const GameSpec& game, const Allocation& red, const Allocation& blue,
                                             const ExactOptions& opts) {
    const Graph& g = *game.graph;
    const int n = g.n();
    if (std::holds_alternative<RandomSequential>(game.schedule))
        throw CapExceeded("exact oracle does not cover random_sequential schedules");

    // Seed resolution probabilities.
    std::vector<double> p_red(n, -1.0);
    double er = 0.0, eb = 0.0;
    for (auto [v, c] : red.support()) p_red[v] = c;
    for (auto [v, c] : blue.support()) {
        if (p_red[v] < 0.0)
            p_red[v] = 0.0;
        else
            p_red[v] = p_red[v] / (p_red[v] + c);
    }
    for (auto [v, c] : red.support())
        if (blue.count(v) == 0) p_red[v] = 1.0;
    for (int v = 0; v < n; ++v)
        if (p_red[v] >= 0.0) {
            er += p_red[v];
            eb += 1.0 - p_red[v];
        }

    bool repeating = std::holds_alternative<ParallelRounds>(game.schedule);
    int rounds = repeating ? std::get<ParallelRounds>(game.schedule).max_rounds : 0;
    bool immunity = has_immunity(game.schedule);
    std::vector<int> batch_of(n, -1);
    if (auto* s = std::get_if<SinglePassOrder>(&game.schedule)) {
        for (std::size_t i = 0; i < s->order.size(); ++i) batch_of[s->order[i]] = static_cast<int>(i);
    } else if (auto* l = std::get_if<LayerOrder>(&game.schedule)) {
        for (std::size_t i = 0; i < l->layers.size(); ++i)
            for (int v : l->layers[i]) batch_of[v] = static_cast<int>(i);
    } else {
        std::fill(batch_of.begin(), batch_of.end(), 0);
    }

    // Vertices that can still change state.
    std::vector<char> active(n, 0);
    for (int v = 0; v < n; ++v) active[v] = p_red[v] < 0.0 && g.in_degree(v) > 0 && batch_of[v] >= 0;

    Budget budget{0, opts.max_nodes};
    std::vector<int> local_of(n, -1), comp_of(n, -1);
    std::vector<int> stack;
    for (int s = 0; s < n; ++s) {
        if (!active[s] || comp_of[s] >= 0) continue;
        std::vector<int> verts;
        bool touched = false;
        comp_of[s] = s;
        stack.push_back(s);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            verts.push_back(v);
            for (int w : g.in_neighbors(v)) {
                if (p_red[w] >= 0.0) touched = true;
                if (active[w] && comp_of[w] < 0) {
                    comp_of[w] = s;
                    stack.push_back(w);
                }
            }
            for (int w : g.out_neighbors(v))
                if (active[w] && comp_of[w] < 0) {
                    comp_of[w] = s;
                    stack.push_back(w);
                }
        }
        if (!touched) continue;
        std::sort(verts.begin(), verts.end());
        for (std::size_t i = 0; i < verts.size(); ++i) local_of[verts[i]] = static_cast<int>(i);

        // Contested seeds feeding this block.
        std::vector<int> contested;
        for (int v : verts)
            for (int w : g.in_neighbors(v))
                if (p_red[w] > 0.0 && p_red[w] < 1.0) contested.push_back(w);
        std::sort(contested.begin(), contested.end());
        contested.erase(std::unique(contested.begin(), contested.end()), contested.end());
        if (contested.size() > 30) throw CapExceeded("too many contested seeds adjacent to one block");

        BlockSolver solver(g, game.dyn, immunity, repeating, rounds, verts, local_of, batch_of, budget);
        std::vector<int> base_r(verts.size()), base_b(verts.size());
        std::uint64_t combos = std::uint64_t{1} << contested.size();
        for (std::uint64_t mask = 0; mask < combos; ++mask) {
            double w = 1.0;
            for (std::size_t i = 0; i < contested.size(); ++i) {
                bool red_wins = (mask >> i) & 1U;
                w *= red_wins ? p_red[contested[i]] : 1.0 - p_red[contested[i]];
            }
            if (w <= 0.0) continue;
            budget.tick();
            for (std::size_t i = 0; i < verts.size(); ++i) {
                int r = 0, b = 0;
                for (int u : g.in_neighbors(verts[i])) {
                    if (p_red[u] < 0.0) continue;
                    bool is_red;
                    if (p_red[u] == 1.0 || p_red[u] == 0.0) {
                        is_red = p_red[u] == 1.0;
                    } else {
                        auto pos = std::lower_bound(contested.begin(), contested.end(), u) - contested.begin();
                        is_red = (mask >> pos) & 1U;
                    }
                    (is_red ? r : b)++;
                }
                base_r[i] = r;
                base_b[i] = b;
            }
            auto [r, b] = solver.solve(base_r, base_b);
            er += w * r;
            eb += w * b;
        }
        for (int v : verts) local_of[v] = -1;
    }
    return {er, eb};
}

PayoffEstimate exact_payoffs(const GameSpec& game, const StrategyProfile& profile, const ExactOptions& opts) {
    validate_profile(profile, game.graph->n(), game.K_R, game.K_B);
    validate_schedule(*game.graph, game.schedule);
    PayoffEstimate e;
    e.method = PayoffMethod::ExactEnumeration;
    for (const auto& [pr, ar] : profile.red.support)
        for (const auto& [pb, ab] : profile.blue.support) {
            if (pr * pb == 0.0) continue;
            auto [r, b] = exact_pure_payoffs(game, ar, ab, opts);
            e.pi_R += pr * pb * r;
            e.pi_B += pr * pb * b;
        }
    return e;
}

}  // namespace contagion
