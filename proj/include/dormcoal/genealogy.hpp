#ifndef DORMCOAL_GENEALOGY_HPP
#define DORMCOAL_GENEALOGY_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dormcoal/model.hpp"
#include "dormcoal/partition.hpp"
#include "dormcoal/rng.hpp"

namespace dormcoal {

// Backward trajectory of the ancestral partition chain Psi_{n,N}.
struct AncestralTrajectory {
    int n = 0;
    bool absorbed = false;
    long days = 0;  // days simulated backward
    // Day-0 state plus the state after every day on which something merged.
    std::vector<std::pair<long, Partition>> events;
    struct MergerDay {
        long day;
        std::vector<int> sizes;  // one entry per merger that day, each >= 2
    };
    std::vector<MergerDay> merger_log;
};

struct AncestralStepResult {
    Partition partition;
    std::vector<int> merger_sizes;
};

// One backward step: blocks whose representatives share a parent merge.
// block_parent[i] is the parent label of block i's representative.
AncestralStepResult ancestral_step(const Partition& p,
                                   std::span<const std::uint32_t> block_parent);

enum class GenealogyMode {
    // Generate each previous day in full (step_generation) and map block
    // representatives through parent_of. Faithful to the construction; O(N) or
    // more per day.
    full_record,
    // Exact-in-law shortcut: the representatives' parents are without-
    // replacement draws from the family-size urn, and for discrete wake laws
    // without summer the all-asleep days (which cannot merge) are skipped with
    // a geometric day jump.
    lineage,
};

AncestralTrajectory run_ancestral_process(int n, const ModelConfig& cfg, long horizon,
                                          RandomStream& rs,
                                          GenealogyMode mode = GenealogyMode::lineage);

enum class CnMethod { factorial_moment, pair_indicator };

struct CnEstimate {
    double point = 0.0;
    double std_error = 0.0;
    std::uint64_t replicates = 0;
    CnMethod method = CnMethod::factorial_moment;
};

// Monte Carlo c_N. factorial_moment evaluates N E[(X_1)_2/(S_N)_2] from the
// family sizes alone (Lemma dict identity), stratifying over wake-back classes
// when the law is discrete and summerless; pair_indicator runs the winter
// sampling and averages sum_i (nu_i)_2 / (N)_2.
CnEstimate estimate_cN(const ModelConfig& cfg, std::uint64_t replicates, RandomStream& rs,
                       CnMethod method = CnMethod::factorial_moment);

// Test hook: same estimators driven by an injected offspring pmf on {1..m}.
CnEstimate estimate_cN_from_pmf(std::span<const double> pmf, std::uint64_t N,
                                std::uint64_t replicates, RandomStream& rs,
                                CnMethod method = CnMethod::factorial_moment);

// Exact N E[(X_1)_2 / (S_N)_2] by full enumeration of the m^N offspring
// outcomes. Refuses (std::invalid_argument, with the size estimate in the
// message) when m^N exceeds ~2e8.
double exact_cN_small(std::span<const double> pmf, int N);

// Exact sides of the factorial-moment identity (2.1) for r <= 2 orders:
//   left  = E[(nu_1)_{k_1} (nu_2)_{k_2}] / (N)_{k_1+k_2}  (hypergeometric enumeration)
//   right = E[(X_1)_{k_1} (X_2)_{k_2} / (S_N)_{k_1+k_2}]
double exact_multimoment_nu(std::span<const double> pmf, int N, std::span<const int> ks);
double exact_multimoment_X(std::span<const double> pmf, int N, std::span<const int> ks);

// Offspring pmf of the two-point model: X = 1 w.p. 1-omega, X ~ Geom(p) w.p.
// omega, truncated where the remaining mass drops below tail_eps and
// renormalized.
std::vector<double> two_point_offspring_pmf(double omega, double geom_p,
                                            double tail_eps = 1e-13);

}  // namespace dormcoal

#endif
