#pragma once

#include <cstdint>
#include <vector>

namespace contagion {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};
MeanSe mean_se(const std::vector<double>& x);

struct TwoSampleTest {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

// Chi-square test of homogeneity between two samples of integer labels.
// Sparse categories are pooled until every expected count reaches 5.
TwoSampleTest chi_square_two_sample(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b);

}  // namespace contagion
