#ifndef DORMCOAL_ANALYSIS_HPP
#define DORMCOAL_ANALYSIS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "dormcoal/lambda_measure.hpp"
#include "dormcoal/model.hpp"
#include "dormcoal/rng.hpp"

namespace dormcoal {

// M_N(n) = E[(G/(G+N-1))^n], G ~ Geom{1,2,...}((kappa N)^{-beta}). Evaluated as
// the exact series sum_m (1-p)^m (x_{m+1}-x_m), x_m = (m/(N-1+m))^n, when the
// series is short enough (<= ~1e8 terms); otherwise the floor is dropped with
// the equidistribution correction -log(1-p)/p, whose error is O(p n / N).
double moments_MN(int n, double N, double beta, double kappa);

// E[Y_kappa^n] = n \int_0^inf u^{n-1} (1+u)^{-(n+1)} e^{-u/kappa} du.
double moment_EYk(double kappa, int n, double abs_tol = 1e-10);

// Y_kappa = kappa W / (kappa W + 1), W ~ Exp(1).
double sample_Y_kappa(double kappa, RandomStream& rs);

// P(X~ > k) = a Gamma(k+1) Gamma(a) / Gamma(k+1+a) for exactly-exponential
// wake-backs; log-gamma evaluation, valid to k ~ 1e9 and beyond.
double tail_exact_exponential(double a, double k);

// h(y) = sum_j (m_j/kappa_j) (y/(1-y))^2 e^{-y/(kappa_j (1-y))}.
double density_h(double y, std::span<const EtaAtom> eta);
// Closed form for eta(dk) = k^{-1-a} dk: h(y) = Gamma(a+1) (y/(1-y))^{1-a}.
double density_h_power_law(double y, double a);

// Built-in omega rules are omega_N = C N^{-p}; p > 1 keeps N omega_N -> 0.
struct OmegaRule {
    double coefficient = 1.0;
    double power = 2.0;
    double operator()(double N) const;
};

// Parameter regimes for the three theorem families.
struct RegimeSpec {
    struct TwoPointRegime {
        double beta;
        double kappa;
        OmegaRule omega;
    };
    struct ExponentialRegime {
        double a;  // gamma / lambda
        double c;
    };
    struct MixtureRegime {
        std::vector<EtaAtom> eta;
        double a1;
        double a2;
        double r;  // in (0, 1/2)
    };
    std::variant<TwoPointRegime, ExponentialRegime, MixtureRegime> regime;

    static RegimeSpec two_point(double beta, double kappa, OmegaRule omega = {});
    static RegimeSpec exponential(double a, double c = 1.0);
    static RegimeSpec mixture(std::vector<EtaAtom> eta, double a1, double a2, double r = 0.25);

    ModelConfig config_for(std::uint64_t N) const;
    // Predicted limit, as a probability measure (the 1/c_N time scale).
    LambdaMeasure limit_measure() const;
};

// Matching c_N asymptotic for a two-point regime (Lemma c1-J):
// beta > 1: N omega_N;  beta = 1: N omega_N E[Y_kappa^2];
// beta < 1: 2 kappa^{2 beta} omega_N N^{2 beta - 1}.
double cN_asymptote(const RegimeSpec& regime, double N);

// Proposition 6.2 construction: the Cannings model approximating the
// Lambda-coalescent with Lambda = a1 delta_0 + a2 delta_1 + eta-interior.
// t_N = T_N = log(N^2), omega_N = N^{-2}, lambda = 1; sigma given early per the
// a1 > 0 / a1 = 0 branch formulas, eta truncated to [N^{-r/2}, N].
struct ConstructResult {
    ModelConfig config;
    double omega;
    double alpha_N;  // truncated eta mass
    std::vector<WakeLaw::MixtureAtom> sigma_given_early;
};
ConstructResult construct_mixture_wake_law(std::span<const EtaAtom> eta, double a1, double a2,
                                           double r, std::uint64_t N);

// --- Theorem 2.1 condition checker -----------------------------------------

struct LimitCheckBudget {
    std::uint64_t cn_replicates = 200000;
    std::uint64_t pilot_replicates = 20000;
    std::uint64_t max_tail_replicates = 4000000;
    double target_rel_se = 0.03;
};

struct LimitCheckEntry {  // one per swept N
    double N;
    double cn_hat, cn_se;
    double cond2_ratio, cond2_se;  // E[(nu_1)_2 (nu_2)_2] / (N^2 c_N)
    std::uint64_t replicates;
};

struct LimitCheckPoint {  // one per (N, x)
    double N;
    double x;
    double lhs, lhs_se;  // (N / c_N) P(nu_1 > N x)
    double rhs;          // \int_x^1 y^{-2} Lambda(dy)
    double z;
    std::uint64_t replicates;
    bool feasible;
};

struct LimitCheckReport {
    std::vector<LimitCheckEntry> entries;
    std::vector<LimitCheckPoint> points;
};

// Estimates conditions 1-3 of the Cannings convergence theorem for each config
// in the sweep. Tail probabilities are stratified over the wake-back class of
// individual 1 (exact identity: the sigma = 0 class cannot produce nu_1 > N x)
// and Rao-Blackwellized through the exact hypergeometric survival given
// (X_1, S_N). Replicate counts come from a pilot run targeting
// budget.target_rel_se, capped at max_tail_replicates with a feasibility flag.
LimitCheckReport check_limit_condition(std::span<const ModelConfig> configs,
                                       const LambdaMeasure& target,
                                       std::span<const double> x_grid,
                                       const LimitCheckBudget& budget,
                                       std::uint64_t master_seed, int workers = 1);

// --- Polya urn bound ---------------------------------------------------------

struct PolyaResult {
    double estimate;
    double std_error;
    double bound;  // 2 / (M + 1)
    std::uint64_t replicates;
};

// Same-color probability of two balls drawn from a Polya urn grown from M
// distinct colors to final_total balls, against the 2/(M+1) bound. Simulated
// by the exact backward color-lineage representation.
PolyaResult polya_same_color_prob(std::uint64_t M, std::uint64_t final_total,
                                  std::uint64_t replicates, RandomStream& rs);

// --- Coupling condition (condTN / condTNb) ----------------------------------

struct CouplingRow {
    double N;
    double T_N;
    double value;         // N^{r+2} c e^{-gamma T_N}
    double logN_over_TN;  // condition (1.5) companion
};

struct CouplingReport {
    std::vector<CouplingRow> rows;
    bool holds;           // sequence decays over the sweep and ends below 1
    bool logN_condition;  // log N / T_N decays over the sweep
};

CouplingReport coupling_condition_holds(double gamma, double c,
                                        const std::function<double(double)>& T_rule, double r,
                                        std::span<const double> N_sweep);

}  // namespace dormcoal

#endif
