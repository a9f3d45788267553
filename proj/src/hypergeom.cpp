#include "dormcoal/hypergeom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dormcoal {

namespace {

struct Support {
    std::uint64_t lo;
    std::uint64_t hi;
    std::uint64_t mode;
};

Support support_of(std::uint64_t total, std::uint64_t marked, std::uint64_t draws) {
    if (marked > total || draws > total)
        throw std::invalid_argument("hypergeometric: marked/draws exceed total");
    const std::uint64_t unmarked = total - marked;
    const std::uint64_t lo = draws > unmarked ? draws - unmarked : 0;
    const std::uint64_t hi = std::min(draws, marked);
    // mode = floor((draws+1)(marked+1)/(total+2)), clamped to the support.
    const long double m =
        (long double)(draws + 1) * (long double)(marked + 1) / (long double)(total + 2);
    std::uint64_t mode = (std::uint64_t)m;
    mode = std::clamp(mode, lo, hi);
    return {lo, hi, mode};
}

// pmf(k+1)/pmf(k)
inline double ratio_up(std::uint64_t total, std::uint64_t marked, std::uint64_t draws,
                       std::uint64_t k) {
    return (double(marked - k) * double(draws - k)) /
           (double(k + 1) * double(total - marked - draws + k + 1));
}

constexpr double kRelEps = 1e-18;

}  // namespace

std::uint64_t hypergeometric_quantile(std::uint64_t total, std::uint64_t marked,
                                      std::uint64_t draws, double u) {
    const Support s = support_of(total, marked, draws);
    if (s.lo == s.hi) return s.lo;

    // Pass 1: total relative weight, anchored at pmf(mode) = 1.
    double wsum = 1.0;
    double w = 1.0;
    for (std::uint64_t k = s.mode; k < s.hi; ++k) {
        w *= ratio_up(total, marked, draws, k);
        wsum += w;
        if (w < kRelEps) break;
    }
    w = 1.0;
    for (std::uint64_t k = s.mode; k > s.lo; --k) {
        w /= ratio_up(total, marked, draws, k - 1);
        wsum += w;
        if (w < kRelEps) break;
    }

    // Pass 2: invert, scanning outward from the mode (up first, then down).
    const double target = u * wsum;
    double cum = 1.0;
    if (target <= cum) return s.mode;
    double wu = 1.0, wd = 1.0;
    std::uint64_t ku = s.mode, kd = s.mode;
    while (true) {
        bool advanced = false;
        if (ku < s.hi && wu >= kRelEps) {
            wu *= ratio_up(total, marked, draws, ku);
            ++ku;
            cum += wu;
            if (target <= cum) return ku;
            advanced = true;
        }
        if (kd > s.lo && wd >= kRelEps) {
            wd /= ratio_up(total, marked, draws, kd - 1);
            --kd;
            cum += wd;
            if (target <= cum) return kd;
            advanced = true;
        }
        if (!advanced) return ku;  // float deficit beyond both tails
    }
}

double hypergeometric_tail(std::uint64_t total, std::uint64_t marked, std::uint64_t draws,
                           std::uint64_t m) {
    const Support s = support_of(total, marked, draws);
    if (m >= s.hi) return 0.0;
    if (m < s.lo) return 1.0;

    double wsum = 1.0;    // everything
    double wabove = 0.0;  // strictly above m
    double w = 1.0;
    for (std::uint64_t k = s.mode; k < s.hi; ++k) {
        w *= ratio_up(total, marked, draws, k);
        wsum += w;
        if (k + 1 > m) wabove += w;
        if (w < kRelEps) break;
    }
    if (s.mode > m) wabove += 1.0;
    w = 1.0;
    for (std::uint64_t k = s.mode; k > s.lo; --k) {
        w /= ratio_up(total, marked, draws, k - 1);
        wsum += w;
        if (k - 1 > m) wabove += w;
        if (w < kRelEps) break;
    }
    return wabove / wsum;
}

double hypergeometric_pmf(std::uint64_t total, std::uint64_t marked, std::uint64_t draws,
                          std::uint64_t k) {
    const Support s = support_of(total, marked, draws);
    if (k < s.lo || k > s.hi) return 0.0;
    double wsum = 1.0;
    double wk = k == s.mode ? 1.0 : 0.0;
    double w = 1.0;
    for (std::uint64_t j = s.mode; j < s.hi; ++j) {
        w *= ratio_up(total, marked, draws, j);
        wsum += w;
        if (j + 1 == k) wk = w;
        if (w < kRelEps && j + 1 >= k) break;
    }
    w = 1.0;
    for (std::uint64_t j = s.mode; j > s.lo; --j) {
        w /= ratio_up(total, marked, draws, j - 1);
        wsum += w;
        if (j - 1 == k) wk = w;
        if (w < kRelEps && j - 1 <= k) break;
    }
    return wk / wsum;
}

}  // namespace dormcoal
