#ifndef DORMCOAL_SPECIAL_HPP
#define DORMCOAL_SPECIAL_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

// Small self-contained special-function kit. Everything is deterministic and
// thread-safe (no signgam, no errno protocol), which keeps Monte Carlo results
// bit-stable across platforms and thread counts.

namespace dormcoal {

// ln Gamma(x) for x > 0, Lanczos approximation (g=7, n=9). |rel err| < 1e-13.
double log_gamma(double x);

// ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a+b), a,b > 0.
inline double log_beta(double a, double b) {
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

inline double beta_function(double a, double b) { return std::exp(log_beta(a, b)); }

// ln C(n, k) for 0 <= k <= n (real-valued n allowed, n >= k).
inline double log_binomial(double n, double k) {
    if (k < 0 || k > n) throw std::invalid_argument("log_binomial: k out of range");
    return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

// Exact binomial coefficient as a double; overflows to inf for huge arguments.
inline double binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0.0;
    if (k > n - k) k = n - k;
    double r = 1.0;
    for (std::uint64_t i = 0; i < k; ++i) r *= double(n - i) / double(i + 1);
    return r;
}

// Regularized lower incomplete gamma P(a, x) and upper Q(a, x) = 1 - P(a, x).
// Series for x < a+1, Lentz continued fraction otherwise.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Survival function of a chi-square with df degrees of freedom.
inline double chi_square_tail(double df, double x) { return gamma_q(0.5 * df, 0.5 * x); }

// Falling factorial (x)_k = x(x-1)...(x-k+1).
inline double falling_factorial(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= (x - i);
    return r;
}

}  // namespace dormcoal

#endif
