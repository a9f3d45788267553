#ifndef DORMCOAL_HYPERGEOM_HPP
#define DORMCOAL_HYPERGEOM_HPP

#include <cstdint>

namespace dormcoal {

// Hypergeometric(total, marked, draws) utilities built on relative pmf weights
// anchored at the mode (which can never underflow), so they stay exact-in-law
// for totals up to 2^62 where log-gamma differences would lose all precision.

// Inverse-CDF sample given a uniform u in [0,1).
std::uint64_t hypergeometric_quantile(std::uint64_t total, std::uint64_t marked,
                                      std::uint64_t draws, double u);

// P(X > m). Exact up to ~1e-15 relative truncation of far tails.
double hypergeometric_tail(std::uint64_t total, std::uint64_t marked, std::uint64_t draws,
                           std::uint64_t m);

// P(X = k), for tests and exact small-case enumeration.
double hypergeometric_pmf(std::uint64_t total, std::uint64_t marked, std::uint64_t draws,
                          std::uint64_t k);

}  // namespace dormcoal

#endif
