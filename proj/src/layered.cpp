#include "contagion/layered.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "contagion/errors.hpp"

namespace contagion {

void validate_layered(const LayeredGame& game) {
    if (game.components.empty()) throw ValidationError("components", "layered game needs a component");
    std::int64_t total = 0;
    for (const auto& c : game.components) {
        if (c.empty()) throw ValidationError("components", "component without layers");
        for (int s : c) {
            if (s < 1) throw ValidationError("components", "layer sizes must be positive");
            total += s;
        }
    }
    if (total > INT32_MAX) throw ValidationError("components", "too many vertices");
}

int LayeredGame::n() const {
    std::int64_t total = 0;
    for (const auto& c : components)
        for (int s : c) total += s;
    return static_cast<int>(total);
}

std::vector<std::vector<int>> LayeredGame::offsets() const {
    std::vector<std::vector<int>> off;
    int base = 0;
    for (const auto& c : components) {
        off.emplace_back();
        for (int s : c) {
            off.back().push_back(base);
            base += s;
        }
    }
    return off;
}

int LayeredGame::vertex(int component, int layer, int index) const {
    int base = 0;
    for (int c = 0; c < component; ++c)
        for (int s : components[c]) base += s;
    for (int l = 0; l < layer; ++l) base += components[component][l];
    return base + index;
}

LayeredGame::Position LayeredGame::locate(int v) const {
    int base = 0;
    for (int c = 0; c < static_cast<int>(components.size()); ++c)
        for (int l = 0; l < static_cast<int>(components[c].size()); ++l) {
            int s = components[c][l];
            if (v < base + s) return {c, l, v - base};
            base += s;
        }
    throw VertexOutOfRange("vertex", "vertex " + std::to_string(v) + " outside layered game");
}

std::int64_t LayeredGame::edge_count() const {
    std::int64_t e = 0;
    for (const auto& c : components)
        for (std::size_t l = 1; l < c.size(); ++l) e += static_cast<std::int64_t>(c[l - 1]) * c[l];
    return e;
}

std::optional<GameSpec> LayeredGame::materialize(std::int64_t max_edges) const {
    validate_layered(*this);
    if (edge_count() > max_edges) return std::nullopt;
    auto off = offsets();
    std::vector<std::pair<int, int>> edges;
    edges.reserve(edge_count());
    std::size_t depth = 0;
    for (const auto& c : components) depth = std::max(depth, c.size());
    std::vector<std::vector<int>> layers(depth);
    for (std::size_t ci = 0; ci < components.size(); ++ci) {
        const auto& c = components[ci];
        for (std::size_t l = 0; l < c.size(); ++l) {
            for (int i = 0; i < c[l]; ++i) layers[l].push_back(off[ci][l] + i);
            if (l == 0) continue;
            for (int u = 0; u < c[l - 1]; ++u)
                for (int v = 0; v < c[l]; ++v) edges.emplace_back(off[ci][l - 1] + u, off[ci][l] + v);
        }
    }
    GameSpec spec;
    spec.graph = std::make_shared<Graph>(n(), true, std::move(edges));
    spec.dyn = dyn;
    spec.schedule = LayerOrder{std::move(layers)};
    spec.K_R = K_R;
    spec.K_B = K_B;
    return spec;
}

namespace {

constexpr double kPruneRel = 1e-17;

// Binomial(n, p) pmf over [lo, hi], pruned where it drops below kPruneRel of
// the mode. pmf is indexed from lo.
void binomial(int n, double p, std::vector<double>& pmf, int& lo, int& hi) {
    if (p <= 0.0 || n == 0) {
        pmf.assign(1, 1.0);
        lo = hi = 0;
        return;
    }
    if (p >= 1.0) {
        pmf.assign(1, 1.0);
        lo = hi = n;
        return;
    }
    int mode = std::min(n, static_cast<int>(std::floor((n + 1) * p)));
    double lm = std::lgamma(n + 1.0) - std::lgamma(mode + 1.0) - std::lgamma(n - mode + 1.0) + mode * std::log(p) +
                (n - mode) * std::log1p(-p);
    double pm = std::exp(lm);
    std::vector<double> up{pm}, down;
    double odds = p / (1.0 - p);
    for (int x = mode; x < n; ++x) {
        double v = up.back() * static_cast<double>(n - x) / (x + 1) * odds;
        if (v < kPruneRel * pm) break;
        up.push_back(v);
    }
    double v = pm;
    for (int x = mode; x > 0; --x) {
        v = v * static_cast<double>(x) / (n - x + 1) / odds;
        if (v < kPruneRel * pm) break;
        down.push_back(v);
    }
    lo = mode - static_cast<int>(down.size());
    hi = mode + static_cast<int>(up.size()) - 1;
    pmf.assign(down.rbegin(), down.rend());
    pmf.insert(pmf.end(), up.begin(), up.end());
}

// Distribution of the Red count among seeded vertices of one layer.
std::vector<double> seed_distribution(const std::vector<double>& p_red) {
    std::vector<double> d{1.0};
    for (double p : p_red) {
        std::vector<double> nd(d.size() + 1, 0.0);
        for (std::size_t i = 0; i < d.size(); ++i) {
            nd[i + 1] += d[i] * p;
            nd[i] += d[i] * (1.0 - p);
        }
        d.swap(nd);
    }
    return d;
}

struct Dist2 {
    int w = 1;  // side length
    std::vector<double> p;
    double& at(int r, int b) { return p[static_cast<std::size_t>(r) * w + b]; }
};

std::pair<double, double> component_dp(const std::vector<int>& sizes, const std::vector<std::vector<double>>& seeds,
                                       const AdoptionFunction& h, double& lost) {
    double er = 0.0, eb = 0.0;
    for (const auto& layer : seeds)
        for (double p : layer) {
            er += p;
            eb += 1.0 - p;
        }
    std::size_t L = sizes.size();
    Dist2 cur;
    cur.w = sizes[0] + 1;
    cur.p.assign(static_cast<std::size_t>(cur.w) * cur.w, 0.0);
    {
        auto sd = seed_distribution(seeds[0]);
        int s = static_cast<int>(seeds[0].size());
        for (int r = 0; r <= s; ++r) cur.at(r, s - r) = sd[r];
    }
    std::vector<double> px, py;
    for (std::size_t i = 1; i < L; ++i) {
        int prev = sizes[i - 1];
        int s = static_cast<int>(seeds[i].size());
        int u = sizes[i] - s;
        bool last = i + 1 == L;
        Dist2 tmp;
        if (!last) {
            tmp.w = u + 1;
            tmp.p.assign(static_cast<std::size_t>(tmp.w) * tmp.w, 0.0);
        }
        for (int r = 0; r <= prev; ++r)
            for (int b = 0; r + b <= prev; ++b) {
                double p = cur.at(r, b);
                if (p <= 0.0) continue;
                auto [pr, pb] = h.probs(r, b, prev);
                er += p * u * pr;
                eb += p * u * pb;
                if (last || u == 0) {
                    if (!last) tmp.at(0, 0) += p;
                    continue;
                }
                int lo, hi;
                binomial(u, pr, px, lo, hi);
                double q = pr < 1.0 ? std::min(1.0, pb / (1.0 - pr)) : 0.0;
                for (int x = lo; x <= hi; ++x) {
                    double wx = p * px[x - lo];
                    int l2, h2;
                    binomial(u - x, q, py, l2, h2);
                    double* row = &tmp.at(x, 0);
                    for (int y = l2; y <= h2; ++y) row[y] += wx * py[y - l2];
                }
            }
        if (last) break;
        auto sd = seed_distribution(seeds[i]);
        Dist2 next;
        next.w = sizes[i] + 1;
        next.p.assign(static_cast<std::size_t>(next.w) * next.w, 0.0);
        double mass = 0.0;
        for (int x = 0; x <= u; ++x)
            for (int y = 0; x + y <= u; ++y) {
                double p = tmp.at(x, y);
                if (p <= 0.0) continue;
                mass += p;
                for (int sr = 0; sr <= s; ++sr) next.at(x + sr, y + s - sr) += p * sd[sr];
            }
        lost += std::max(0.0, 1.0 - mass);
        // Renormalising would bias; the dropped mass is reported instead.
        cur = std::move(next);
    }
    return {er, eb};
}

}  // namespace

std::pair<double, double> layered_pure_payoffs(const LayeredGame& game, const Allocation& red, const Allocation& blue,
                                               double* truncated_mass) {
    int n = game.n();
    if (red.n() != n || blue.n() != n) throw ValidationError("profile", "allocation length differs from vertex count");
    // Per component, per layer: resolution probability of each seeded vertex.
    std::vector<std::vector<std::vector<double>>> seeds(game.components.size());
    for (std::size_t c = 0; c < game.components.size(); ++c) seeds[c].resize(game.components[c].size());
    auto rs = red.support(), bs = blue.support();
    std::vector<std::pair<int, std::pair<int, int>>> merged;
    for (auto [v, c] : rs) merged.push_back({v, {c, 0}});
    for (auto [v, c] : bs) merged.push_back({v, {0, c}});
    std::sort(merged.begin(), merged.end());
    for (std::size_t i = 0; i < merged.size();) {
        int v = merged[i].first, cr = 0, cb = 0;
        for (; i < merged.size() && merged[i].first == v; ++i) {
            cr += merged[i].second.first;
            cb += merged[i].second.second;
        }
        auto pos = game.locate(v);
        seeds[pos.component][pos.layer].push_back(static_cast<double>(cr) / (cr + cb));
    }
    double er = 0.0, eb = 0.0, lost = 0.0;
    for (std::size_t c = 0; c < game.components.size(); ++c) {
        bool any = false;
        for (const auto& l : seeds[c]) any |= !l.empty();
        if (!any) continue;
        auto [r, b] = component_dp(game.components[c], seeds[c], game.dyn, lost);
        er += r;
        eb += b;
    }
    if (truncated_mass) *truncated_mass = lost;
    return {er, eb};
}

PayoffEstimate layered_exact_payoffs(const LayeredGame& game, const StrategyProfile& profile) {
    validate_layered(game);
    validate_profile(profile, game.n(), game.K_R, game.K_B);
    PayoffEstimate e;
    e.method = PayoffMethod::ExactLayeredDp;
    for (const auto& [pr, ar] : profile.red.support)
        for (const auto& [pb, ab] : profile.blue.support) {
            if (pr * pb == 0.0) continue;
            double lost = 0.0;
            auto [r, b] = layered_pure_payoffs(game, ar, ab, &lost);
            e.pi_R += pr * pb * r;
            e.pi_B += pr * pb * b;
            e.truncated_mass = std::max(e.truncated_mass, lost);
        }
    return e;
}

}  // namespace contagion
