#include "contagion/game.hpp"

#include <algorithm>
#include <cmath>

#include "contagion/errors.hpp"
#include "contagion/parallel.hpp"

namespace contagion {

Allocation::Allocation(int n, std::vector<int> seeds) : n_(n), seeds_(std::move(seeds)) {
    std::sort(seeds_.begin(), seeds_.end());
    for (int v : seeds_)
        if (v < 0 || v >= n) throw VertexOutOfRange("seeds", "seed vertex " + std::to_string(v) + " out of range");
}

Allocation Allocation::from_counts(const std::vector<int>& counts) {
    std::vector<int> seeds;
    for (std::size_t v = 0; v < counts.size(); ++v) {
        if (counts[v] < 0) throw ValidationError("counts", "negative seed count at vertex " + std::to_string(v));
        seeds.insert(seeds.end(), counts[v], static_cast<int>(v));
    }
    return Allocation(static_cast<int>(counts.size()), std::move(seeds));
}

std::vector<int> Allocation::counts() const {
    std::vector<int> c(n_, 0);
    for (int v : seeds_) ++c[v];
    return c;
}

int Allocation::count(int v) const {
    auto [lo, hi] = std::equal_range(seeds_.begin(), seeds_.end(), v);
    return static_cast<int>(hi - lo);
}

std::vector<std::pair<int, int>> Allocation::support() const {
    std::vector<std::pair<int, int>> out;
    for (int v : seeds_) {
        if (!out.empty() && out.back().first == v)
            ++out.back().second;
        else
            out.emplace_back(v, 1);
    }
    return out;
}

void validate_profile(const StrategyProfile& p, int n, int K_R, int K_B) {
    auto check = [n](const MixedStrategy& m, int K, const std::string& who) {
        if (m.support.empty()) throw ValidationError(who, "strategy has empty support");
        double total = 0.0;
        for (std::size_t i = 0; i < m.support.size(); ++i) {
            const auto& [prob, a] = m.support[i];
            std::string field = who + "[" + std::to_string(i) + "]";
            if (!(prob >= 0.0 && prob <= 1.0)) throw ValidationError(field + ".p", "probability outside [0,1]");
            if (a.n() != n) throw ValidationError(field + ".counts", "length differs from vertex count");
            if (a.budget() != K)
                throw ValidationError(field + ".counts", "seeds sum to " + std::to_string(a.budget()) +
                                                             ", budget is " + std::to_string(K));
            total += prob;
        }
        if (std::abs(total - 1.0) > 1e-12) throw ValidationError(who, "probabilities do not sum to 1");
    };
    if (K_R < 1 || K_B < 1) throw ValidationError("budgets", "budgets must be at least 1");
    check(p.red, K_R, "red");
    check(p.blue, K_B, "blue");
}

std::string to_string(PayoffMethod m) {
    switch (m) {
        case PayoffMethod::ExactEnumeration:
            return "exact-enumeration";
        case PayoffMethod::ExactLayeredDp:
            return "exact-layered-dp";
        case PayoffMethod::MonteCarlo:
            return "monte-carlo";
    }
    return "";
}

StateVector resolve_contested_seeds(const Allocation& red, const Allocation& blue, Rng& rng) {
    if (red.n() != blue.n()) throw ValidationError("profile", "allocations over different vertex counts");
    StateVector s(red.n(), VState::U);
    auto rs = red.support(), bs = blue.support();
    std::size_t j = 0;
    for (auto [v, c] : rs) {
        while (j < bs.size() && bs[j].first < v) s[bs[j++].first] = VState::B;
        if (j < bs.size() && bs[j].first == v) {
            double p = static_cast<double>(c) / (c + bs[j].second);
            s[v] = rng.uniform() < p ? VState::R : VState::B;
            ++j;
        } else {
            s[v] = VState::R;
        }
    }
    for (; j < bs.size(); ++j) s[bs[j].first] = VState::B;
    return s;
}

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

namespace {

const Allocation& sample(const MixedStrategy& m, Rng& rng) {
    if (m.is_pure()) return m.pure_allocation();
    double u = rng.uniform(), acc = 0.0;
    for (const auto& [p, a] : m.support) {
        acc += p;
        if (u < acc) return a;
    }
    return m.support.back().second;
}

void replicate(const GameSpec& game, const StrategyProfile& profile, std::uint64_t master, std::int64_t i,
               double& chi_r, double& chi_b) {
    Rng rng(derive_seed(master, static_cast<std::uint64_t>(i)));
    const Allocation& r = sample(profile.red, rng);
    const Allocation& b = sample(profile.blue, rng);
    StateVector init = resolve_contested_seeds(r, b, rng);
    SimOutcome out = detail::run_unchecked(*game.graph, init, game.dyn, game.schedule, rng.next());
    chi_r = out.chi_R;
    chi_b = out.chi_B;
}

PayoffEstimate summarize(std::vector<double>& xr, std::vector<double>& xb) {
    PayoffEstimate e;
    e.method = PayoffMethod::MonteCarlo;
    std::size_t n = xr.size();
    e.n_trials = static_cast<std::int64_t>(n);
    auto stats = [n](std::vector<double>& x, double& mean, double& se) {
        mean = pairwise_sum(x.data(), n) / static_cast<double>(n);
        if (n < 2) {
            se = 0.0;
            return;
        }
        for (double& v : x) v = (v - mean) * (v - mean);
        double var = pairwise_sum(x.data(), n) / static_cast<double>(n - 1);
        se = std::sqrt(var / static_cast<double>(n));
    };
    stats(xr, e.pi_R, e.stderr_R);
    stats(xb, e.pi_B, e.stderr_B);
    return e;
}

void precheck(const GameSpec& game, const StrategyProfile& profile, std::int64_t n_trials) {
    if (n_trials < 1) throw ValidationError("n_trials", "must be at least 1");
    validate_profile(profile, game.graph->n(), game.K_R, game.K_B);
    validate_schedule(*game.graph, game.schedule);
}

}  // namespace

PayoffEstimate estimate_payoffs(const GameSpec& game, const StrategyProfile& profile, std::int64_t n_trials,
                                std::uint64_t master_seed, int threads) {
    precheck(game, profile, n_trials);
    std::vector<double> xr(n_trials), xb(n_trials);
    ExceptionSlot err;
#pragma omp parallel for schedule(dynamic, 64) num_threads(resolve_threads(threads))
    for (std::int64_t i = 0; i < n_trials; ++i)
        err.run([&] { replicate(game, profile, master_seed, i, xr[i], xb[i]); });
    err.rethrow();
    return summarize(xr, xb);
}

PayoffEstimate estimate_payoffs_serial(const GameSpec& game, const StrategyProfile& profile, std::int64_t n_trials,
                                       std::uint64_t master_seed) {
    precheck(game, profile, n_trials);
    std::vector<double> xr(n_trials), xb(n_trials);
    for (std::int64_t i = 0; i < n_trials; ++i) replicate(game, profile, master_seed, i, xr[i], xb[i]);
    return summarize(xr, xb);
}

}  // namespace contagion
