#include "contagion/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/chi_squared.hpp>

#include "contagion/game.hpp"

namespace contagion {

MeanSe mean_se(const std::vector<double>& x) {
    MeanSe out;
    std::size_t n = x.size();
    if (n == 0) return out;
    out.mean = pairwise_sum(x.data(), n) / static_cast<double>(n);
    if (n < 2) return out;
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = (x[i] - out.mean) * (x[i] - out.mean);
    out.se = std::sqrt(pairwise_sum(d.data(), n) / static_cast<double>(n - 1) / static_cast<double>(n));
    return out;
}

TwoSampleTest chi_square_two_sample(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    std::map<std::int64_t, std::pair<double, double>> counts;
    for (auto v : a) counts[v].first += 1.0;
    for (auto v : b) counts[v].second += 1.0;
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size()), total = na + nb;
    // Pool adjacent categories in label order.
    std::vector<std::pair<double, double>> bins;
    std::pair<double, double> acc{0.0, 0.0};
    auto min_expected = [&](const std::pair<double, double>& c) {
        double t = c.first + c.second;
        return std::min(t * na / total, t * nb / total);
    };
    for (const auto& [label, c] : counts) {
        acc.first += c.first;
        acc.second += c.second;
        if (min_expected(acc) >= 5.0) {
            bins.push_back(acc);
            acc = {0.0, 0.0};
        }
    }
    if (acc.first + acc.second > 0.0) {
        if (bins.empty()) {
            bins.push_back(acc);
        } else {
            bins.back().first += acc.first;
            bins.back().second += acc.second;
        }
    }
    TwoSampleTest t;
    t.dof = static_cast<int>(bins.size()) - 1;
    if (t.dof < 1) return t;
    for (const auto& [ca, cb] : bins) {
        double row = ca + cb;
        double ea = row * na / total, eb = row * nb / total;
        t.statistic += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
    }
    boost::math::chi_squared dist(t.dof);
    t.p_value = boost::math::cdf(boost::math::complement(dist, t.statistic));
    return t;
}

}  // namespace contagion
