#include "dormcoal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dormcoal/special.hpp"

namespace dormcoal {

namespace {

// Pools trailing cells until every expected count reaches min_expected.
void pool_cells(std::vector<double>& obs, std::vector<double>& exp, double min_expected) {
    for (std::size_t i = exp.size(); i-- > 0;) {
        if (exp[i] >= min_expected || i == 0) continue;
        exp[i - 1] += exp[i];
        obs[i - 1] += obs[i];
        exp.erase(exp.begin() + std::ptrdiff_t(i));
        obs.erase(obs.begin() + std::ptrdiff_t(i));
    }
    // A deficient leading cell pools forward.
    while (exp.size() > 1 && exp.front() < min_expected) {
        exp[1] += exp[0];
        obs[1] += obs[0];
        exp.erase(exp.begin());
        obs.erase(obs.begin());
    }
}

}  // namespace

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> pmf, double min_expected) {
    if (observed.size() != pmf.size() || observed.empty())
        throw std::invalid_argument("chi_square_gof: mismatched cells");
    double total = 0.0;
    for (auto o : observed) total += double(o);
    std::vector<double> obs(observed.begin(), observed.end());
    std::vector<double> exp(pmf.size());
    for (std::size_t i = 0; i < pmf.size(); ++i) exp[i] = pmf[i] * total;
    pool_cells(obs, exp, min_expected);
    ChiSquareResult r;
    r.df = int(exp.size()) - 1;
    if (r.df < 1) return r;
    for (std::size_t i = 0; i < exp.size(); ++i) {
        if (exp[i] <= 0) {
            if (obs[i] > 0) r.statistic = std::numeric_limits<double>::infinity();
            continue;
        }
        const double d = obs[i] - exp[i];
        r.statistic += d * d / exp[i];
    }
    r.p_value = chi_square_tail(double(r.df), r.statistic);
    return r;
}

ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                      std::span<const std::uint64_t> b,
                                      double min_expected) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("chi_square_two_sample: mismatched cells");
    double na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += double(a[i]);
        nb += double(b[i]);
    }
    if (!(na > 0) || !(nb > 0))
        throw std::invalid_argument("chi_square_two_sample: empty sample");
    // Fold into a GOF test of sample a against the pooled distribution, with
    // the standard (na+nb)/nb variance factor absorbed by using both samples.
    std::vector<double> obs_a(a.begin(), a.end()), obs_b(b.begin(), b.end());
    std::vector<double> exp_a(a.size()), exp_b(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double pooled = (obs_a[i] + obs_b[i]) / (na + nb);
        exp_a[i] = pooled * na;
        exp_b[i] = pooled * nb;
    }
    // Pool cells jointly (driven by the smaller expected count).
    for (std::size_t i = exp_a.size(); i-- > 1;) {
        if (std::min(exp_a[i], exp_b[i]) >= min_expected) continue;
        exp_a[i - 1] += exp_a[i];
        exp_b[i - 1] += exp_b[i];
        obs_a[i - 1] += obs_a[i];
        obs_b[i - 1] += obs_b[i];
        exp_a.erase(exp_a.begin() + std::ptrdiff_t(i));
        exp_b.erase(exp_b.begin() + std::ptrdiff_t(i));
        obs_a.erase(obs_a.begin() + std::ptrdiff_t(i));
        obs_b.erase(obs_b.begin() + std::ptrdiff_t(i));
    }
    ChiSquareResult r;
    r.df = int(exp_a.size()) - 1;
    if (r.df < 1) return r;
    for (std::size_t i = 0; i < exp_a.size(); ++i) {
        if (exp_a[i] > 0) {
            const double d = obs_a[i] - exp_a[i];
            r.statistic += d * d / exp_a[i];
        }
        if (exp_b[i] > 0) {
            const double d = obs_b[i] - exp_b[i];
            r.statistic += d * d / exp_b[i];
        }
    }
    r.p_value = chi_square_tail(double(r.df), r.statistic);
    return r;
}

double total_variation(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("total_variation: mismatched cells");
    double na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += double(a[i]);
        nb += double(b[i]);
    }
    double tv = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        tv += std::fabs(double(a[i]) / na - double(b[i]) / nb);
    return 0.5 * tv;
}

double total_variation_se(std::span<const std::uint64_t> a,
                          std::span<const std::uint64_t> b) {
    double na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += double(a[i]);
        nb += double(b[i]);
    }
    double var = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double pa = double(a[i]) / na;
        const double pb = double(b[i]) / nb;
        var += pa * (1 - pa) / na + pb * (1 - pb) / nb;
    }
    return 0.5 * std::sqrt(var);
}

}  // namespace dormcoal
