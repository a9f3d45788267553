#ifndef DORMCOAL_FORWARD_HPP
#define DORMCOAL_FORWARD_HPP

#include <cstdint>
#include <vector>

#include "dormcoal/model.hpp"
#include "dormcoal/rng.hpp"

namespace dormcoal {

// Everything produced by one day of the model: activation times, end-of-spring
// and end-of-summer family sizes, the winter survival counts and the survivor
// -> parent assignment.
struct GenerationRecord {
    std::vector<double> wake_times;        // tau_i in [0, t_spring]
    OffspringVector x_spring;              // sizes at t_spring
    OffspringVector x_total;               // sizes at t_total, nu filled
    std::vector<std::uint32_t> parent_of;  // size N, parent index of each survivor slot
    void validate() const;
};

// i.i.d. activation times for n individuals.
std::vector<double> sample_wake_times(const WakeLaw& law, std::size_t n, double t_spring,
                                      RandomStream& rs);

// Geometric growth over the rest of spring: X_i ~ Geom{1,2,...} with success
// parameter exp(-lambda (t_spring - tau_i)).
OffspringVector simulate_spring(const ModelConfig& cfg, const std::vector<double>& wake_times,
                                RandomStream& rs);

// Yule growth over the summer: a family of size m becomes a sum of m i.i.d.
// Geom{1,2,...}(exp(-lambda*duration)) draws (exact time-t marginal). The
// per-individual inversion sampler makes the common-random-numbers coupling
// monotone in duration. Overflow names the offending family.
OffspringVector simulate_summer(const OffspringVector& x_spring, double duration,
                                double lambda, RandomStream& rs);

struct SurvivorDraw {
    OffspringVector x;                     // input sizes with nu filled
    std::vector<std::uint32_t> parent_of;  // shuffled parent labels, size N
};

// Winter: N survivors sampled without replacement from the S_N offspring
// (multivariate hypergeometric, sequential conditional per family).
SurvivorDraw sample_survivors(const OffspringVector& x, RandomStream& rs);

// One full day: wake -> spring -> summer -> winter.
GenerationRecord step_generation(const ModelConfig& cfg, RandomStream& rs);

}  // namespace dormcoal

#endif
