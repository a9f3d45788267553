#ifndef DORMCOAL_MODEL_HPP
#define DORMCOAL_MODEL_HPP

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "dormcoal/rng.hpp"

namespace dormcoal {

// Per-parent family sizes before (x) and, once winter sampling ran, after (nu).
struct OffspringVector {
    std::vector<std::uint64_t> x;
    std::uint64_t total = 0;
    std::optional<std::vector<std::uint64_t>> nu;

    static OffspringVector from_sizes(std::vector<std::uint64_t> sizes);
    std::uint64_t population_size() const { return x.size(); }
    // Throws std::logic_error on any violated invariant (x_i >= 1, total = sum x,
    // sum nu = N, nu_i <= x_i).
    void validate() const;
};

// Activation-time law, parameterized by the wake-back time sigma = t_spring - tau
// (time left to reproduce within spring once awake). All variants must keep
// sigma within [0, t_spring].
struct WakeLaw {
    struct TwoPoint {
        double omega;      // P(tau = 0)
        double late_time;  // tau for the non-early majority
    };
    struct ExponentialTail {
        double gamma;        // tail rate of zeta
        double c;            // tail scale: P(zeta > y) = min(1, c e^{-gamma y})
        double truncate_at;  // sigma = min(zeta, truncate_at)
    };
    struct MixtureAtom {
        double sigma;
        double weight;
    };
    struct Mixture {
        std::vector<MixtureAtom> atoms;
    };
    struct Degenerate {
        double time;  // everyone wakes at tau = time
    };

    std::variant<TwoPoint, ExponentialTail, Mixture, Degenerate> law;

    void validate(double t_spring) const;
    // sigma = t_spring - tau for one individual.
    double sample_wake_back(double t_spring, RandomStream& rs) const;
    // Largest possible sigma (truncate_at for the exponential variant).
    double max_wake_back(double t_spring) const;

    static WakeLaw two_point(double omega, double late_time);
    static WakeLaw exponential_tail(double gamma, double c, double truncate_at);
    static WakeLaw mixture(std::vector<MixtureAtom> atoms);
    static WakeLaw degenerate(double time);
};

// One model instance: population size, birth rate, season lengths, wake law.
struct ModelConfig {
    std::uint64_t N = 0;
    double lambda = 0.0;    // birth rate
    double t_spring = 0.0;  // t_N
    double t_total = 0.0;   // T_N
    WakeLaw wake;

    bool has_summer() const { return t_total > t_spring; }
    double summer_length() const { return t_total - t_spring; }
    // Throws std::invalid_argument naming the offending field. Rejects
    // bounded-wake-back configs whose worst-case growth exceeds 62-bit family
    // sizes; unbounded (exponential-tail) laws are guarded per draw instead.
    void validate() const;
};

// Decomposition of a wake law into finitely many wake-back classes, available
// when the law is discrete. The sigma == 0 class ("trivial") forces X = 1 in a
// summerless model, which the stratified estimators exploit.
struct ActivationClasses {
    struct Active {
        double sigma;
        double weight;
        double growth;  // lambda * sigma
    };
    double trivial_weight = 0.0;
    double active_weight = 0.0;
    std::vector<Active> active;
};

// Returns the class decomposition when cfg.wake is discrete and the model has
// no summer; nullopt otherwise (continuous law or summer growth present).
std::optional<ActivationClasses> activation_classes(const ModelConfig& cfg);

}  // namespace dormcoal

#endif
