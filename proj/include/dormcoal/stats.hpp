#ifndef DORMCOAL_STATS_HPP
#define DORMCOAL_STATS_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace dormcoal {

struct ChiSquareResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
};

// Goodness of fit of observed counts against a pmf over the same cells.
// Cells with expected count below min_expected are pooled right-to-left.
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> pmf, double min_expected = 5.0);

// Two-sample homogeneity chi-square on aligned count vectors.
ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                      std::span<const std::uint64_t> b,
                                      double min_expected = 5.0);

// Total variation distance between two empirical distributions given as counts.
double total_variation(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

// Delta-method standard error of the total variation estimate above
// (independent multinomials, cellwise-independent approximation).
double total_variation_se(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

}  // namespace dormcoal

#endif
