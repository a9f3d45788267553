#ifndef DORMCOAL_COALESCENT_HPP
#define DORMCOAL_COALESCENT_HPP

#include <vector>

#include "dormcoal/lambda_measure.hpp"
#include "dormcoal/partition.hpp"
#include "dormcoal/rng.hpp"

namespace dormcoal {

// lambda_{b,k} = \int_0^1 y^{k-2} (1-y)^{b-k} Lambda(dy), 2 <= k <= b.
// Atom conventions: delta_0 contributes to k = 2 only (Kingman part), delta_1
// to k = b only. Beta interiors in closed form, eta/density interiors by
// adaptive quadrature to abs_tol.
double rate_lambda_bk(const LambdaMeasure& m, int b, int k, double abs_tol = 1e-10);

enum class RateMethod { closed_form, quadrature };

// Precomputed rates for all 2 <= k <= b <= b_max, with per-entry provenance.
class RatesTable {
  public:
    static RatesTable build(const LambdaMeasure& m, int b_max, double abs_tol = 1e-10);

    int b_max() const { return b_max_; }
    const LambdaMeasure& measure() const { return measure_; }
    double rate(int b, int k) const;
    RateMethod method(int b, int k) const;
    // C(b,k) * lambda_{b,k}
    double event_rate(int b, int k) const;
    // Total holding rate with b blocks.
    double total_rate(int b) const;
    // max |lambda_{b,k} - lambda_{b+1,k} - lambda_{b+1,k+1}| over the table.
    double max_consistency_residual() const;

  private:
    LambdaMeasure measure_;
    int b_max_ = 0;
    std::vector<double> rates_;      // packed triangular
    std::vector<RateMethod> method_;
    std::vector<double> total_;      // per b
    std::size_t idx(int b, int k) const;
};

// Event rates (rate of *some* k-merger happening) for k = 2..b; entry [k-2].
std::vector<double> total_merger_rates(const LambdaMeasure& m, int b);

// pmf over the size k in {2..n} of the first merger event; entry [k-2].
std::vector<double> first_merger_size_law(const LambdaMeasure& m, int n);
std::vector<double> first_merger_size_law(const RatesTable& table, int n);

struct CoalescentTrajectory {
    std::vector<double> event_times;
    std::vector<int> merger_sizes;       // blocks merged at each event
    std::vector<Partition> states;       // state after each event; states[0] = start
    bool absorbed = false;
};

// Embedded-jump-chain simulation: with b blocks, hold Exp(total rate), pick the
// merger size k proportional to C(b,k) lambda_{b,k}, merge a uniform k-subset.
CoalescentTrajectory simulate_lambda_coalescent(const RatesTable& table, int n,
                                                RandomStream& rs);
CoalescentTrajectory simulate_lambda_coalescent(const LambdaMeasure& m, int n,
                                                RandomStream& rs);

// Poissonian paintbox simulation, the cross-implementation for measures with
// finite \int y^{-2} Lambda(dy) and no mass at zero (eta interiors plus a
// delta_1 atom): events arrive at that total rate, each event draws y (a
// Y_kappa for the eta part, y = 1 for the atom) and every block joins the
// merger independently with probability y. Throws for measures with a
// delta_0 atom or a non-eta interior.
CoalescentTrajectory simulate_paintbox(const LambdaMeasure& m, int n, RandomStream& rs);

}  // namespace dormcoal

#endif
