#include "dormcoal/coalescent.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dormcoal/quadrature.hpp"
#include "dormcoal/special.hpp"

namespace dormcoal {

double rate_lambda_bk(const LambdaMeasure& m, int b, int k, double abs_tol) {
    if (k < 2 || k > b) throw std::invalid_argument("rate_lambda_bk: need 2 <= k <= b");
    double r = 0.0;
    if (k == 2) r += m.mass_at_zero;
    if (k == b) r += m.mass_at_one;
    if (const auto* bi = std::get_if<LambdaMeasure::BetaInterior>(&m.interior)) {
        const double a = bi->a;
        r += std::exp(log_beta(k - a, b - k + a) - log_beta(2.0 - a, a));
    } else if (const auto* ei = std::get_if<LambdaMeasure::EtaInterior>(&m.interior)) {
        // u = y/(1-y) turns the integrand into (1/kappa) u^k (1+u)^{-b} e^{-u/kappa}.
        const double tol = abs_tol / std::max<std::size_t>(1, ei->atoms.size());
        for (const auto& a : ei->atoms)
            if (a.mass > 0)
                r += a.mass / a.kappa *
                     integral_power_ratio_exp(double(k), double(b), 1.0 / a.kappa, tol);
    } else if (const auto* di = std::get_if<LambdaMeasure::DensityInterior>(&m.interior)) {
        auto f = [&](double y) {
            if (y <= 0.0 || y >= 1.0) return 0.0;
            return std::exp((k - 2) * std::log(y) + (b - k) * std::log1p(-y)) * di->h(y);
        };
        r += integrate(f, 0.0, 1.0, abs_tol);
    }
    return r;
}

std::size_t RatesTable::idx(int b, int k) const {
    return std::size_t(b - 1) * std::size_t(b - 2) / 2 + std::size_t(k - 2);
}

RatesTable RatesTable::build(const LambdaMeasure& m, int b_max, double abs_tol) {
    if (b_max < 2) throw std::invalid_argument("RatesTable: b_max must be >= 2");
    RatesTable t;
    t.measure_ = m;
    t.b_max_ = b_max;
    const std::size_t n = std::size_t(b_max) * std::size_t(b_max - 1) / 2;
    t.rates_.resize(n);
    t.method_.resize(n);
    t.total_.assign(std::size_t(b_max) + 1, 0.0);
    const bool closed = std::holds_alternative<std::monostate>(m.interior) ||
                        std::holds_alternative<LambdaMeasure::BetaInterior>(m.interior);
    for (int b = 2; b <= b_max; ++b) {
        double tot = 0.0;
        for (int k = 2; k <= b; ++k) {
            const double r = rate_lambda_bk(m, b, k, abs_tol);
            const double ev = binomial(std::uint64_t(b), std::uint64_t(k)) * r;
            if (!std::isfinite(ev))
                throw std::invalid_argument("RatesTable: C(b,k) rate overflows, b_max too big");
            t.rates_[t.idx(b, k)] = r;
            t.method_[t.idx(b, k)] = closed ? RateMethod::closed_form : RateMethod::quadrature;
            tot += ev;
        }
        t.total_[b] = tot;
    }
    return t;
}

double RatesTable::rate(int b, int k) const {
    if (k < 2 || k > b || b > b_max_) throw std::invalid_argument("RatesTable: (b,k) out of range");
    return rates_[idx(b, k)];
}

RateMethod RatesTable::method(int b, int k) const {
    if (k < 2 || k > b || b > b_max_) throw std::invalid_argument("RatesTable: (b,k) out of range");
    return method_[idx(b, k)];
}

double RatesTable::event_rate(int b, int k) const {
    return binomial(std::uint64_t(b), std::uint64_t(k)) * rate(b, k);
}

double RatesTable::total_rate(int b) const {
    if (b < 2 || b > b_max_) throw std::invalid_argument("RatesTable: b out of range");
    return total_[std::size_t(b)];
}

double RatesTable::max_consistency_residual() const {
    double worst = 0.0;
    for (int b = 2; b + 1 <= b_max_; ++b)
        for (int k = 2; k <= b; ++k) {
            const double res = std::fabs(rate(b, k) - rate(b + 1, k) - rate(b + 1, k + 1));
            worst = std::fmax(worst, res);
        }
    return worst;
}

std::vector<double> total_merger_rates(const LambdaMeasure& m, int b) {
    if (b < 2) throw std::invalid_argument("total_merger_rates: b must be >= 2");
    std::vector<double> out(std::size_t(b - 1));
    for (int k = 2; k <= b; ++k)
        out[std::size_t(k - 2)] =
            binomial(std::uint64_t(b), std::uint64_t(k)) * rate_lambda_bk(m, b, k);
    return out;
}

std::vector<double> first_merger_size_law(const LambdaMeasure& m, int n) {
    std::vector<double> p = total_merger_rates(m, n);
    const double tot = std::accumulate(p.begin(), p.end(), 0.0);
    if (!(tot > 0)) throw std::invalid_argument("first_merger_size_law: zero total rate");
    for (double& v : p) v /= tot;
    return p;
}

std::vector<double> first_merger_size_law(const RatesTable& table, int n) {
    if (n < 2 || n > table.b_max())
        throw std::invalid_argument("first_merger_size_law: n out of table range");
    std::vector<double> p(std::size_t(n - 1));
    double tot = 0.0;
    for (int k = 2; k <= n; ++k) tot += (p[std::size_t(k - 2)] = table.event_rate(n, k));
    if (!(tot > 0)) throw std::invalid_argument("first_merger_size_law: zero total rate");
    for (double& v : p) v /= tot;
    return p;
}

CoalescentTrajectory simulate_lambda_coalescent(const RatesTable& table, int n,
                                                RandomStream& rs) {
    if (n < 1) throw std::invalid_argument("simulate_lambda_coalescent: n must be >= 1");
    if (n > table.b_max())
        throw std::invalid_argument("simulate_lambda_coalescent: n exceeds table b_max");
    CoalescentTrajectory traj;
    Partition p = Partition::singletons(n);
    traj.states.push_back(p);
    double t = 0.0;
    while (p.block_count() >= 2) {
        const int b = p.block_count();
        const double total = table.total_rate(b);
        if (!(total > 0)) return traj;  // zero measure: never coalesces
        t += rs.exponential(total);
        // merger size proportional to C(b,k) lambda_{b,k}
        const double u = rs.uniform01() * total;
        int k = 2;
        double cum = 0.0;
        for (; k < b; ++k) {
            cum += table.event_rate(b, k);
            if (u < cum) break;
        }
        // uniform k-subset of the b blocks
        std::vector<int> ids(static_cast<std::size_t>(b));
        std::iota(ids.begin(), ids.end(), 0);
        for (int j = 0; j < k; ++j) {
            const std::uint64_t r = rs.uniform_index(std::uint64_t(b - j));
            std::swap(ids[std::size_t(j)], ids[std::size_t(j) + r]);
        }
        ids.resize(std::size_t(k));
        p = p.merge_blocks({ids});
        traj.event_times.push_back(t);
        traj.merger_sizes.push_back(k);
        traj.states.push_back(p);
    }
    traj.absorbed = p.block_count() <= 1;
    return traj;
}

CoalescentTrajectory simulate_lambda_coalescent(const LambdaMeasure& m, int n,
                                                RandomStream& rs) {
    return simulate_lambda_coalescent(RatesTable::build(m, std::max(2, n)), n, rs);
}

CoalescentTrajectory simulate_paintbox(const LambdaMeasure& m, int n, RandomStream& rs) {
    if (m.mass_at_zero != 0.0)
        throw std::invalid_argument("simulate_paintbox: delta_0 atom has infinite intensity");
    const auto* ei = std::get_if<LambdaMeasure::EtaInterior>(&m.interior);
    if (!ei && m.has_interior())
        throw std::invalid_argument("simulate_paintbox: interior must be an eta mixture");
    // y^{-2} Lambda(dy) total mass: each f_kappa integrates to 1.
    double rate = m.mass_at_one;
    std::vector<double> weights;
    if (ei)
        for (const auto& a : ei->atoms) {
            rate += a.mass;
            weights.push_back(a.mass);
        }
    CoalescentTrajectory traj;
    Partition p = Partition::singletons(n);
    traj.states.push_back(p);
    double t = 0.0;
    while (p.block_count() >= 2) {
        if (!(rate > 0)) return traj;
        t += rs.exponential(rate);
        double y;
        double u = rs.uniform01() * rate;
        if (u < m.mass_at_one) {
            y = 1.0;
        } else {
            u -= m.mass_at_one;
            std::size_t j = 0;
            double cum = 0.0;
            for (; j + 1 < weights.size(); ++j) {
                cum += weights[j];
                if (u < cum) break;
            }
            const double w = rs.exponential();
            const double kw = ei->atoms[j].kappa * w;
            y = kw / (kw + 1.0);
        }
        std::vector<int> joining;
        for (int i = 0; i < p.block_count(); ++i)
            if (rs.bernoulli(y)) joining.push_back(i);
        if (joining.size() < 2) continue;  // event touches at most one block
        p = p.merge_blocks({joining});
        traj.event_times.push_back(t);
        traj.merger_sizes.push_back(int(joining.size()));
        traj.states.push_back(p);
    }
    traj.absorbed = p.block_count() <= 1;
    return traj;
}

}  // namespace dormcoal
