#include "dormcoal/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dormcoal {

OffspringVector OffspringVector::from_sizes(std::vector<std::uint64_t> sizes) {
    OffspringVector v;
    v.x = std::move(sizes);
    unsigned __int128 t = 0;
    for (std::uint64_t xi : v.x) {
        if (xi == 0) throw std::logic_error("OffspringVector: family size must be >= 1");
        t += xi;
    }
    if (t > (unsigned __int128)1 << 62)
        throw std::overflow_error("OffspringVector: total exceeds 62-bit budget");
    v.total = (std::uint64_t)t;
    return v;
}

void OffspringVector::validate() const {
    unsigned __int128 t = 0;
    for (std::uint64_t xi : x) {
        if (xi == 0) throw std::logic_error("OffspringVector: family size must be >= 1");
        t += xi;
    }
    if (t != total) throw std::logic_error("OffspringVector: total != sum(x)");
    if (total < x.size()) throw std::logic_error("OffspringVector: total < N");
    if (nu) {
        if (nu->size() != x.size()) throw std::logic_error("OffspringVector: |nu| != N");
        std::uint64_t s = 0;
        for (std::size_t i = 0; i < nu->size(); ++i) {
            if ((*nu)[i] > x[i]) throw std::logic_error("OffspringVector: nu_i > x_i");
            s += (*nu)[i];
        }
        if (s != x.size()) throw std::logic_error("OffspringVector: sum(nu) != N");
    }
}

WakeLaw WakeLaw::two_point(double omega, double late_time) {
    return WakeLaw{TwoPoint{omega, late_time}};
}
WakeLaw WakeLaw::exponential_tail(double gamma, double c, double truncate_at) {
    return WakeLaw{ExponentialTail{gamma, c, truncate_at}};
}
WakeLaw WakeLaw::mixture(std::vector<MixtureAtom> atoms) {
    return WakeLaw{Mixture{std::move(atoms)}};
}
WakeLaw WakeLaw::degenerate(double time) { return WakeLaw{Degenerate{time}}; }

void WakeLaw::validate(double t_spring) const {
    struct V {
        double t_spring;
        void operator()(const TwoPoint& l) const {
            if (!(l.omega >= 0 && l.omega <= 1))
                throw std::invalid_argument("wake.omega: must be in [0,1]");
            if (!(l.late_time >= 0 && l.late_time <= t_spring))
                throw std::invalid_argument("wake.late_time: must be in [0, t_spring]");
        }
        void operator()(const ExponentialTail& l) const {
            if (!(l.gamma > 0)) throw std::invalid_argument("wake.gamma: must be > 0");
            if (!(l.c > 0)) throw std::invalid_argument("wake.c: must be > 0");
            if (!(l.truncate_at > 0 && l.truncate_at <= t_spring))
                throw std::invalid_argument("wake.truncate_at: must be in (0, t_spring]");
        }
        void operator()(const Mixture& l) const {
            if (l.atoms.empty()) throw std::invalid_argument("wake.atoms: empty mixture");
            double sum = 0;
            for (const auto& a : l.atoms) {
                if (!(a.weight >= 0)) throw std::invalid_argument("wake.atoms: negative weight");
                if (!(a.sigma >= 0 && a.sigma <= t_spring))
                    throw std::invalid_argument("wake.atoms: sigma out of [0, t_spring]");
                sum += a.weight;
            }
            if (std::fabs(sum - 1.0) > 1e-9)
                throw std::invalid_argument("wake.atoms: weights must sum to 1");
        }
        void operator()(const Degenerate& l) const {
            if (!(l.time >= 0 && l.time <= t_spring))
                throw std::invalid_argument("wake.time: must be in [0, t_spring]");
        }
    };
    std::visit(V{t_spring}, law);
}

double WakeLaw::sample_wake_back(double t_spring, RandomStream& rs) const {
    struct S {
        double t_spring;
        RandomStream& rs;
        double operator()(const TwoPoint& l) const {
            return rs.bernoulli(l.omega) ? t_spring : t_spring - l.late_time;
        }
        double operator()(const ExponentialTail& l) const {
            // Inverse CDF of P(zeta > y) = min(1, c e^{-gamma y}); for c < 1 this
            // puts an atom of mass 1-c at zero (floor-at-1 law).
            const double y0 = l.c > 1.0 ? std::log(l.c) / l.gamma : 0.0;
            const double u = rs.uniform_pos();
            const double zeta = std::fmax(y0, std::log(l.c / u) / l.gamma);
            return std::fmin(zeta, l.truncate_at);
        }
        double operator()(const Mixture& l) const {
            const double u = rs.uniform01();
            double cum = 0;
            for (const auto& a : l.atoms) {
                cum += a.weight;
                if (u < cum) return a.sigma;
            }
            return l.atoms.back().sigma;
        }
        double operator()(const Degenerate& l) const { return t_spring - l.time; }
    };
    return std::visit(S{t_spring, rs}, law);
}

double WakeLaw::max_wake_back(double t_spring) const {
    struct M {
        double t_spring;
        double operator()(const TwoPoint&) const { return t_spring; }
        double operator()(const ExponentialTail& l) const { return l.truncate_at; }
        double operator()(const Mixture& l) const {
            double m = 0;
            for (const auto& a : l.atoms)
                if (a.weight > 0) m = std::fmax(m, a.sigma);
            return m;
        }
        double operator()(const Degenerate& l) const { return t_spring - l.time; }
    };
    return std::visit(M{t_spring}, law);
}

void ModelConfig::validate() const {
    if (N == 0) throw std::invalid_argument("N: must be >= 1");
    if (!(lambda >= 0)) throw std::invalid_argument("lambda: must be >= 0");
    if (!(t_spring > 0)) throw std::invalid_argument("t_spring: must be > 0");
    if (!(t_total >= t_spring)) throw std::invalid_argument("t_total: must be >= t_spring");
    wake.validate(t_spring);
    // Worst-case per-family mean growth must fit 62-bit counts; the exponential
    // law is unbounded and relies on the per-draw overflow guard instead.
    if (!std::holds_alternative<WakeLaw::ExponentialTail>(wake.law)) {
        const double worst = lambda * (wake.max_wake_back(t_spring) + summer_length());
        if (worst > 62.0 * std::numbers::ln2)
            throw std::invalid_argument(
                "lambda/t_total: worst-case growth exp(lambda*(wake-back+summer)) exceeds "
                "2^62 family-size budget");
    }
}

std::optional<ActivationClasses> activation_classes(const ModelConfig& cfg) {
    if (cfg.has_summer() && cfg.lambda > 0) return std::nullopt;
    ActivationClasses out;
    auto add = [&](double sigma, double weight) {
        if (weight <= 0) return;
        if (cfg.lambda * sigma <= 0) {
            out.trivial_weight += weight;
        } else {
            out.active.push_back({sigma, weight, cfg.lambda * sigma});
            out.active_weight += weight;
        }
    };
    if (const auto* tp = std::get_if<WakeLaw::TwoPoint>(&cfg.wake.law)) {
        add(cfg.t_spring, tp->omega);
        add(cfg.t_spring - tp->late_time, 1.0 - tp->omega);
    } else if (const auto* mx = std::get_if<WakeLaw::Mixture>(&cfg.wake.law)) {
        for (const auto& a : mx->atoms) add(a.sigma, a.weight);
    } else if (const auto* dg = std::get_if<WakeLaw::Degenerate>(&cfg.wake.law)) {
        add(cfg.t_spring - dg->time, 1.0);
    } else {
        return std::nullopt;
    }
    return out;
}

}  // namespace dormcoal
