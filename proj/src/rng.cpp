#include "dormcoal/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "dormcoal/hypergeom.hpp"

namespace dormcoal {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RandomStream::next_u64() {
    state_ += kGamma;
    return mix64(state_);
}

double RandomStream::uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

double RandomStream::uniform_pos() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

double RandomStream::exponential(double rate) {
    if (!(rate > 0)) throw std::invalid_argument("exponential: rate must be > 0");
    return -std::log(uniform_pos()) / rate;
}

bool RandomStream::bernoulli(double p) { return uniform01() < p; }

std::uint64_t RandomStream::uniform_index(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_index: bound must be > 0");
    std::uint64_t x = next_u64();
    unsigned __int128 m = (unsigned __int128)x * bound;
    std::uint64_t lo = (std::uint64_t)m;
    if (lo < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (lo < threshold) {
            x = next_u64();
            m = (unsigned __int128)x * bound;
            lo = (std::uint64_t)m;
        }
    }
    return (std::uint64_t)(m >> 64);
}

std::uint64_t RandomStream::geometric_from_growth(double growth) {
    if (growth <= 0) return 1;
    // -log(1 - p) with p = exp(-growth); log1p keeps tiny p exact.
    const double rate = -std::log1p(-std::exp(-growth));
    const double e = exponential();
    const double q = e / rate;  // rate == 0 -> inf -> overflow below
    if (!(q < 4.6e18)) throw std::overflow_error("geometric draw exceeds 62-bit family size");
    return 1 + (std::uint64_t)q;
}

std::uint64_t RandomStream::geometric_ge1(double p) {
    if (p >= 1.0) return 1;
    if (!(p > 0)) throw std::invalid_argument("geometric_ge1: requires p in (0,1]");
    const double rate = -std::log1p(-p);
    const double q = exponential() / rate;
    if (!(q < 4.6e18)) throw std::overflow_error("geometric draw exceeds 62-bit family size");
    return 1 + (std::uint64_t)q;
}

std::uint64_t RandomStream::binomial(std::uint64_t n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial: p out of [0,1]");
    if (p == 0.0 || n == 0) return 0;
    if (p == 1.0) return n;
    if (double(n) * p > 64.0) {
        // Keep the inversion walk short; exact by the convolution identity.
        const std::uint64_t h = n / 2;
        return binomial(h, p) + binomial(n - h, p);
    }
    const double u = uniform01();
    double f = std::exp(double(n) * std::log1p(-p));
    double cum = f;
    std::uint64_t k = 0;
    const double odds = p / (1.0 - p);
    while (u > cum && k < n) {
        f *= (double(n - k) / double(k + 1)) * odds;
        cum += f;
        ++k;
    }
    return k;
}

std::uint64_t RandomStream::binomial_at_least_one(std::uint64_t n, double p) {
    if (n == 0 || !(p > 0.0)) throw std::invalid_argument("binomial_at_least_one: empty event");
    if (p >= 1.0) return n;
    if (double(n) * p > 64.0) {
        // Conditioning is immaterial when P(0) is already negligible.
        const std::uint64_t k = binomial(n, p);
        return k == 0 ? 1 : k;
    }
    const double p0 = std::exp(double(n) * std::log1p(-p));
    const double u = p0 + uniform01() * (1.0 - p0);
    double f = p0;
    double cum = f;
    std::uint64_t k = 0;
    const double odds = p / (1.0 - p);
    while (u > cum && k < n) {
        f *= (double(n - k) / double(k + 1)) * odds;
        cum += f;
        ++k;
    }
    return k == 0 ? 1 : k;
}

std::uint64_t RandomStream::hypergeometric(std::uint64_t total, std::uint64_t marked,
                                           std::uint64_t draws) {
    return hypergeometric_quantile(total, marked, draws, uniform01());
}

std::size_t RandomStream::categorical(std::span<const double> pmf) {
    const double u = uniform01();
    double cum = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        cum += pmf[i];
        if (u < cum) return i;
    }
    return pmf.size() - 1;
}

RandomStream derive_stream(const SeedSpec& spec) {
    const std::uint64_t s =
        mix64(mix64(spec.master_seed ^ kGamma) + (spec.replicate_index + 1) * kGamma);
    return RandomStream(s);
}

std::uint64_t salt_seed(std::uint64_t master_seed, const char* tag) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
    for (const char* p = tag; *p; ++p) {
        h ^= (unsigned char)*p;
        h *= 1099511628211ULL;
    }
    return master_seed ^ h;
}

}  // namespace dormcoal
