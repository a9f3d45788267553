#include "dormcoal/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

#include "dormcoal/hypergeom.hpp"
#include "dormcoal/parallel.hpp"
#include "dormcoal/quadrature.hpp"
#include "dormcoal/special.hpp"

namespace dormcoal {

double moments_MN(int n, double N, double beta, double kappa) {
    if (n < 1 || !(N >= 2) || !(beta > 0) || !(kappa > 0))
        throw std::invalid_argument("moments_MN: need n>=1, N>=2, beta>0, kappa>0");
    if (!(kappa * N > 1.0))
        throw std::invalid_argument("moments_MN: needs kappa N > 1");
    const double p = std::pow(kappa * N, -beta);
    const double q = 1.0 - p;
    if (34.0 / p <= 1e8) {
        // Exact: M_N(n) = sum_m q^m (x_{m+1} - x_m), x_m = (m/(N-1+m))^n.
        double sum = 0.0, comp = 0.0;
        double qm = 1.0;
        double xm = 0.0;
        for (double m = 0.0;; m += 1.0) {
            const double xm1 = std::pow((m + 1.0) / (N - 1.0 + m + 1.0), double(n));
            const double term = qm * (xm1 - xm);
            const double y = term - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            xm = xm1;
            qm *= q;
            if (qm * (1.0 - xm) < 1e-15) break;
        }
        return sum;
    }
    // Floorless integral with the equidistribution correction; error O(p n / N).
    const double correction = -std::log1p(-p) / p;
    const double alpha = -(N - 1.0) * std::log1p(-p);
    return correction * n *
           integral_power_ratio_exp(double(n - 1), double(n + 1), alpha, 1e-12);
}

double moment_EYk(double kappa, int n, double abs_tol) {
    if (!(kappa > 0) || n < 0) throw std::invalid_argument("moment_EYk: need kappa>0, n>=0");
    if (n == 0) return 1.0;
    return n * integral_power_ratio_exp(double(n - 1), double(n + 1), 1.0 / kappa, abs_tol);
}

double sample_Y_kappa(double kappa, RandomStream& rs) {
    if (!(kappa > 0)) throw std::invalid_argument("sample_Y_kappa: kappa must be > 0");
    const double kw = kappa * rs.exponential();
    return kw / (kw + 1.0);
}

double tail_exact_exponential(double a, double k) {
    if (!(a > 0) || k < 0) throw std::invalid_argument("tail_exact_exponential: need a>0, k>=0");
    return std::exp(std::log(a) + log_gamma(k + 1.0) + log_gamma(a) - log_gamma(k + 1.0 + a));
}

double density_h(double y, std::span<const EtaAtom> eta) {
    if (!(y > 0 && y < 1)) throw std::invalid_argument("density_h: y must be in (0,1)");
    const double u = y / (1.0 - y);
    double h = 0.0;
    for (const auto& a : eta) h += a.mass / a.kappa * u * u * std::exp(-u / a.kappa);
    return h;
}

double density_h_power_law(double y, double a) {
    if (!(y > 0 && y < 1)) throw std::invalid_argument("density_h: y must be in (0,1)");
    if (!(a > 0 && a < 2)) throw std::invalid_argument("density_h: power law needs a in (0,2)");
    return std::exp(log_gamma(a + 1.0) + (1.0 - a) * (std::log(y) - std::log1p(-y)));
}

double OmegaRule::operator()(double N) const {
    return coefficient * std::pow(N, -power);
}

RegimeSpec RegimeSpec::two_point(double beta, double kappa, OmegaRule omega) {
    if (!(beta > 0) || !(kappa > 0))
        throw std::invalid_argument("two_point regime: need beta>0, kappa>0");
    if (!(omega.power > 1.0))
        throw std::invalid_argument(
            "two_point regime: omega rule C N^{-p} needs p > 1 so that N omega_N -> 0");
    return RegimeSpec{TwoPointRegime{beta, kappa, omega}};
}

RegimeSpec RegimeSpec::exponential(double a, double c) {
    if (!(a > 0) || !(c > 0)) throw std::invalid_argument("exponential regime: need a, c > 0");
    return RegimeSpec{ExponentialRegime{a, c}};
}

RegimeSpec RegimeSpec::mixture(std::vector<EtaAtom> eta, double a1, double a2, double r) {
    if (!(r > 0 && r < 0.5)) throw std::invalid_argument("mixture regime: r must be in (0,1/2)");
    if (a1 < 0 || a2 < 0) throw std::invalid_argument("mixture regime: negative atom mass");
    return RegimeSpec{MixtureRegime{std::move(eta), a1, a2, r}};
}

ModelConfig RegimeSpec::config_for(std::uint64_t N) const {
    if (const auto* tp = std::get_if<TwoPointRegime>(&regime)) {
        const double t = tp->beta * std::log(tp->kappa * double(N));
        if (!(t > 0))
            throw std::invalid_argument("two_point regime: beta log(kappa N) must be > 0");
        ModelConfig cfg{N, 1.0, t, t, WakeLaw::two_point(tp->omega(double(N)), t)};
        cfg.validate();
        return cfg;
    }
    if (const auto* ex = std::get_if<ExponentialRegime>(&regime)) {
        const double T = std::pow(std::log(double(N)), 2.0);
        if (!(T > 0)) throw std::invalid_argument("exponential regime: N too small");
        ModelConfig cfg{N, 1.0, T, T, WakeLaw::exponential_tail(ex->a, ex->c, T)};
        cfg.validate();
        return cfg;
    }
    const auto& mx = std::get<MixtureRegime>(regime);
    return construct_mixture_wake_law(mx.eta, mx.a1, mx.a2, mx.r, N).config;
}

LambdaMeasure RegimeSpec::limit_measure() const {
    if (const auto* tp = std::get_if<TwoPointRegime>(&regime)) {
        if (tp->beta > 1) return LambdaMeasure::star();
        if (tp->beta == 1) return LambdaMeasure::kappa_normalized(tp->kappa);
        return LambdaMeasure::kingman();
    }
    if (const auto* ex = std::get_if<ExponentialRegime>(&regime)) {
        if (ex->a >= 2) return LambdaMeasure::kingman();
        if (ex->a >= 1) return LambdaMeasure::beta(ex->a);
        throw std::invalid_argument(
            "limit_measure: a < 1 has a discrete-time Xi-coalescent limit, not a "
            "Lambda-coalescent");
    }
    const auto& mx = std::get<MixtureRegime>(regime);
    // On the 1/c_N scale the limit is the probability measure Lambda / Lambda([0,1]).
    LambdaMeasure lam = LambdaMeasure::eta_mixture(mx.eta, mx.a1, mx.a2);
    const double total = lam.total_mass();
    if (!(total > 0)) throw std::invalid_argument("limit_measure: zero measure");
    std::vector<EtaAtom> scaled = mx.eta;
    for (auto& a : scaled) a.mass /= total;
    return LambdaMeasure::eta_mixture(std::move(scaled), mx.a1 / total, mx.a2 / total);
}

double cN_asymptote(const RegimeSpec& regime, double N) {
    const auto* tp = std::get_if<RegimeSpec::TwoPointRegime>(&regime.regime);
    if (!tp) throw std::invalid_argument("cN_asymptote: two-point regimes only");
    const double omega = tp->omega(N);
    if (tp->beta > 1) return N * omega;
    if (tp->beta == 1) return N * omega * moment_EYk(tp->kappa, 2);
    return 2.0 * std::pow(tp->kappa, 2.0 * tp->beta) * omega * std::pow(N, 2.0 * tp->beta - 1.0);
}

namespace {

struct ConstructWeights {
    bool admissible;
    double alpha_N;
    std::vector<WakeLaw::MixtureAtom> sigma;  // conditional law given early
};

ConstructWeights construct_weights(std::span<const EtaAtom> eta, double a1, double a2,
                                   double r, double N) {
    const double lo = std::pow(N, -r / 2.0);
    const double hi = N;
    double alpha = 0.0;
    std::vector<WakeLaw::MixtureAtom> sigma;
    const double scale = (a1 > 0 ? 2.0 / a1 : 1.0) * std::pow(N, -2.0 * r);
    for (const auto& atom : eta) {
        if (atom.kappa < lo || atom.kappa > hi || atom.mass <= 0) continue;
        alpha += atom.mass;
        sigma.push_back({std::log(atom.kappa * N), scale * atom.mass});
    }
    sigma.push_back({std::log(N) * (1.0 + r), scale * a2});
    const double used = scale * (alpha + a2);
    const double remainder = 1.0 - used;
    sigma.push_back({a1 > 0 ? std::log(N) * (1.0 - r) : 0.0, remainder});
    bool ok = remainder >= 0.0;
    for (const auto& s : sigma) ok = ok && s.weight >= 0.0 && s.weight <= 1.0;
    return {ok, alpha, std::move(sigma)};
}

}  // namespace

ConstructResult construct_mixture_wake_law(std::span<const EtaAtom> eta, double a1, double a2,
                                           double r, std::uint64_t N) {
    if (!(r > 0 && r < 0.5))
        throw std::invalid_argument("construct_mixture_wake_law: r must be in (0, 1/2)");
    if (a1 < 0 || a2 < 0)
        throw std::invalid_argument("construct_mixture_wake_law: negative atom mass");
    for (const auto& a : eta)
        if (!(a.kappa > 0) || a.mass < 0)
            throw std::invalid_argument("construct_mixture_wake_law: bad eta atom");
    ConstructWeights w = construct_weights(eta, a1, a2, r, double(N));
    if (!w.admissible) {
        // Find the minimal admissible N (weights are eventually admissible since
        // N^{-2r} (alpha_N + a2) -> 0).
        std::uint64_t hi = std::max<std::uint64_t>(N, 2);
        while (!construct_weights(eta, a1, a2, r, double(hi)).admissible) {
            if (hi > (std::uint64_t(1) << 50))
                throw std::invalid_argument("construct_mixture_wake_law: no admissible N found");
            hi *= 2;
        }
        std::uint64_t lo = hi / 2;
        while (lo + 1 < hi) {
            const std::uint64_t mid = lo + (hi - lo) / 2;
            (construct_weights(eta, a1, a2, r, double(mid)).admissible ? hi : lo) = mid;
        }
        throw std::invalid_argument(
            "construct_mixture_wake_law: mixture weights fall outside [0,1] at N = " +
            std::to_string(N) + "; minimal admissible N = " + std::to_string(hi));
    }
    const double T = std::log(double(N) * double(N));
    const double omega = 1.0 / (double(N) * double(N));
    // Flatten the two-stage law (Bernoulli(omega) early flag, then sigma) into
    // one atom list; sigma = 0 is the asleep-until-the-end class.
    std::vector<WakeLaw::MixtureAtom> atoms;
    atoms.push_back({0.0, 1.0 - omega});
    for (const auto& s : w.sigma) {
        if (s.weight <= 0) continue;
        if (s.sigma == 0.0)
            atoms.front().weight += omega * s.weight;
        else
            atoms.push_back({s.sigma, omega * s.weight});
    }
    ConstructResult out;
    out.config = ModelConfig{N, 1.0, T, T, WakeLaw::mixture(std::move(atoms))};
    out.config.validate();
    out.omega = omega;
    out.alpha_N = w.alpha_N;
    out.sigma_given_early = std::move(w.sigma);
    return out;
}

// --- check_limit_condition ---------------------------------------------------

namespace {

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t i) {
    return seed ^ ((i + 1) * 0x9E3779B97F4A7C15ULL);
}

struct ClassSampler {
    const ActivationClasses* cls;
    std::vector<double> pmf;  // conditional class pmf given active

    explicit ClassSampler(const ActivationClasses& c) : cls(&c) {
        pmf.resize(c.active.size());
        for (std::size_t j = 0; j < pmf.size(); ++j)
            pmf[j] = c.active[j].weight / c.active_weight;
    }
    std::uint64_t draw_sbar(std::uint64_t others, RandomStream& rs) const {
        std::uint64_t sbar = others;
        if (cls->active_weight > 0) {
            const std::uint64_t K = rs.binomial(others, cls->active_weight);
            for (std::uint64_t j = 0; j < K; ++j) {
                const auto& c = cls->active[rs.categorical(pmf)];
                sbar += rs.geometric_from_growth(c.growth) - 1;
            }
        }
        return sbar;
    }
};

// Draws one end-of-day offspring vector and returns (X_1, S).
std::pair<std::uint64_t, std::uint64_t> draw_bulk_day(const ModelConfig& cfg,
                                                      RandomStream& rs) {
    std::uint64_t x1 = 0;
    unsigned __int128 total = 0;
    const double summer_growth = cfg.lambda * cfg.summer_length();
    for (std::uint64_t i = 0; i < cfg.N; ++i) {
        const double sigma = cfg.wake.sample_wake_back(cfg.t_spring, rs);
        std::uint64_t xi = rs.geometric_from_growth(cfg.lambda * sigma);
        if (summer_growth > 0) {
            std::uint64_t grown = 0;
            for (std::uint64_t jj = 0; jj < xi; ++jj)
                grown += rs.geometric_from_growth(summer_growth);
            xi = grown;
        }
        if (i == 0) x1 = xi;
        total += xi;
    }
    if (total > (unsigned __int128)1 << 62)
        throw std::overflow_error("check_limit_condition: S_N exceeds 62-bit budget");
    return {x1, std::uint64_t(total)};
}

}  // namespace

LimitCheckReport check_limit_condition(std::span<const ModelConfig> configs,
                                       const LambdaMeasure& target,
                                       std::span<const double> x_grid,
                                       const LimitCheckBudget& budget,
                                       std::uint64_t master_seed, int workers) {
    for (double x : x_grid)
        if (!(x > 0 && x < 1))
            throw std::invalid_argument("check_limit_condition: x grid must lie in (0,1)");
    LimitCheckReport report;
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        const ModelConfig& cfg = configs[ci];
        cfg.validate();
        const std::uint64_t N = cfg.N;
        const double Nd = double(N);
        const auto classes = activation_classes(cfg);
        const std::uint64_t seed_cn = sub_seed(salt_seed(master_seed, "limit.cn"), ci);
        const std::uint64_t seed_c2 = sub_seed(salt_seed(master_seed, "limit.cond2"), ci);
        const std::uint64_t seed_p = sub_seed(salt_seed(master_seed, "limit.pilot"), ci);
        const std::uint64_t seed_t = sub_seed(salt_seed(master_seed, "limit.tail"), ci);

        // Condition 1: c_N.
        MomentSums cn;
        if (classes && classes->active_weight > 0) {
            ClassSampler cs(*classes);
            cn = parallel_mc(seed_cn, budget.cn_replicates, workers, [&](RandomStream& rs) {
                const double sbar = double(cs.draw_sbar(N - 1, rs));
                double v = 0.0;
                for (const auto& c : classes->active) {
                    const double g = double(rs.geometric_from_growth(c.growth));
                    const double s = g + sbar;
                    v += c.weight * g * (g - 1.0) / (s * (s - 1.0));
                }
                return Nd * v;
            });
        } else if (classes) {
            cn.n = budget.cn_replicates;  // degenerate: c_N = 0 exactly
        } else {
            // factorial-moment estimator over all families
            cn = parallel_mc(seed_cn, budget.cn_replicates, workers, [&](RandomStream& rs) {
                unsigned __int128 tot = 0;
                double num = 0.0;
                const double summer_growth = cfg.lambda * cfg.summer_length();
                for (std::uint64_t i = 0; i < N; ++i) {
                    const double sigma = cfg.wake.sample_wake_back(cfg.t_spring, rs);
                    std::uint64_t xi = rs.geometric_from_growth(cfg.lambda * sigma);
                    if (summer_growth > 0) {
                        std::uint64_t grown = 0;
                        for (std::uint64_t jj = 0; jj < xi; ++jj)
                            grown += rs.geometric_from_growth(summer_growth);
                        xi = grown;
                    }
                    num += double(xi) * (double(xi) - 1.0);
                    tot += xi;
                }
                const double s = double((std::uint64_t)tot);
                return num / (s * (s - 1.0));
            });
        }
        const double cn_hat = cn.mean();
        const double cn_se = cn.std_error();

        // Condition 2: E[(nu_1)_2 (nu_2)_2] / (N^2 c_N), via the factorial-moment
        // identity E[(nu_1)_2 (nu_2)_2] = (N)_4 E[(X_1)_2 (X_2)_2 / (S)_4].
        MomentSums c2;
        if (classes && classes->active_weight > 0) {
            ClassSampler cs(*classes);
            c2 = parallel_mc(seed_c2, budget.cn_replicates, workers, [&](RandomStream& rs) {
                const double sbar = double(cs.draw_sbar(N - 2, rs));
                double v = 0.0;
                for (const auto& cA : classes->active) {
                    const double g1 = double(rs.geometric_from_growth(cA.growth));
                    for (const auto& cB : classes->active) {
                        const double g2 = double(rs.geometric_from_growth(cB.growth));
                        const double s = g1 + g2 + sbar;
                        v += cA.weight * cB.weight * g1 * (g1 - 1.0) * g2 * (g2 - 1.0) /
                             falling_factorial(s, 4);
                    }
                }
                return v;
            });
        } else if (!classes) {
            c2 = parallel_mc(seed_c2, std::max<std::uint64_t>(budget.cn_replicates / 4, 1),
                             workers, [&](RandomStream& rs) {
                                 // needs X_1 and X_2: draw the day, track both
                                 std::uint64_t x1 = 0, x2 = 0;
                                 unsigned __int128 tot = 0;
                                 const double sg = cfg.lambda * cfg.summer_length();
                                 for (std::uint64_t i = 0; i < N; ++i) {
                                     const double sigma =
                                         cfg.wake.sample_wake_back(cfg.t_spring, rs);
                                     std::uint64_t xi =
                                         rs.geometric_from_growth(cfg.lambda * sigma);
                                     if (sg > 0) {
                                         std::uint64_t grown = 0;
                                         for (std::uint64_t jj = 0; jj < xi; ++jj)
                                             grown += rs.geometric_from_growth(sg);
                                         xi = grown;
                                     }
                                     if (i == 0) x1 = xi;
                                     if (i == 1) x2 = xi;
                                     tot += xi;
                                 }
                                 const double s = double((std::uint64_t)tot);
                                 return double(x1) * (double(x1) - 1.0) * double(x2) *
                                        (double(x2) - 1.0) / falling_factorial(s, 4);
                             });
        }
        const double n4 = falling_factorial(Nd, 4);
        const double cond2_scale = cn_hat > 0 ? n4 / (Nd * Nd * cn_hat) : 0.0;

        report.entries.push_back({Nd, cn_hat, cn_se, c2.mean() * cond2_scale,
                                  c2.std_error() * cond2_scale, budget.cn_replicates});

        // Condition 3: tails.
        const std::size_t G = x_grid.size();
        std::vector<std::uint64_t> thresholds(G);
        for (std::size_t g = 0; g < G; ++g)
            thresholds[g] = std::uint64_t(std::floor(Nd * x_grid[g]));

        std::function<void(RandomStream&, std::vector<double>&)> sampler;
        std::shared_ptr<ClassSampler> cs;
        if (classes && classes->active_weight > 0) {
            cs = std::make_shared<ClassSampler>(*classes);
            sampler = [&, cs](RandomStream& rs, std::vector<double>& out) {
                const std::uint64_t sbar = cs->draw_sbar(N - 1, rs);
                out.assign(G, 0.0);
                for (const auto& c : classes->active) {
                    const std::uint64_t g1 = rs.geometric_from_growth(c.growth);
                    const std::uint64_t s = g1 + sbar;
                    for (std::size_t g = 0; g < G; ++g)
                        out[g] += c.weight * hypergeometric_tail(s, g1, N, thresholds[g]);
                }
            };
        } else if (classes) {
            sampler = [&](RandomStream&, std::vector<double>& out) { out.assign(G, 0.0); };
        } else {
            sampler = [&](RandomStream& rs, std::vector<double>& out) {
                const auto [x1, s] = draw_bulk_day(cfg, rs);
                for (std::size_t g = 0; g < G; ++g)
                    out[g] = hypergeometric_tail(s, x1, N, thresholds[g]);
            };
        }

        const auto pilot = parallel_mc_vec(seed_p, budget.pilot_replicates, workers, G, sampler);
        std::uint64_t need = budget.pilot_replicates;
        for (std::size_t g = 0; g < G; ++g) {
            const double m = pilot[g].mean();
            if (!(m > 0)) {
                need = budget.max_tail_replicates;
                continue;
            }
            const double var =
                pilot[g].std_error() * pilot[g].std_error() * double(pilot[g].n);
            const double target = budget.target_rel_se * m;
            need = std::max<std::uint64_t>(
                need, std::uint64_t(std::min(1e18, var / (target * target) + 1.0)));
        }
        need = std::min(need, budget.max_tail_replicates);
        const auto main_run = parallel_mc_vec(seed_t, need, workers, G, sampler);

        for (std::size_t g = 0; g < G; ++g) {
            const double T = main_run[g].mean();
            const double se_T = main_run[g].std_error();
            LimitCheckPoint pt;
            pt.N = Nd;
            pt.x = x_grid[g];
            pt.replicates = need;
            pt.rhs = target.integral_inv_y2(x_grid[g]);
            if (cn_hat > 0) {
                pt.lhs = Nd / cn_hat * T;
                const double dT = Nd / cn_hat * se_T;
                const double dc = Nd * T / (cn_hat * cn_hat) * cn_se;
                pt.lhs_se = std::sqrt(dT * dT + dc * dc);
            } else {
                pt.lhs = 0.0;
                pt.lhs_se = 0.0;
            }
            pt.z = pt.lhs_se > 0 ? (pt.lhs - pt.rhs) / pt.lhs_se
                                 : (pt.lhs == pt.rhs ? 0.0
                                                     : std::numeric_limits<double>::infinity());
            pt.feasible = T > 0 ? se_T <= 0.34 * T : pt.rhs == 0.0;
            report.points.push_back(pt);
        }
    }
    return report;
}

PolyaResult polya_same_color_prob(std::uint64_t M, std::uint64_t final_total,
                                  std::uint64_t replicates, RandomStream& rs) {
    if (M < 1 || final_total < M)
        throw std::invalid_argument("polya_same_color_prob: need 1 <= M <= final_total");
    if (final_total < 2)
        throw std::invalid_argument("polya_same_color_prob: need two balls to draw");
    std::uint64_t same = 0;
    for (std::uint64_t r = 0; r < replicates; ++r) {
        // Backward color lineages: ball j > M copied a uniform ball in [1, j-1];
        // two balls share a color iff their lineages meet.
        std::uint64_t a = 1 + rs.uniform_index(final_total);
        std::uint64_t b = a;
        while (b == a) b = 1 + rs.uniform_index(final_total);
        while (a != b) {
            std::uint64_t& hi = a > b ? a : b;
            if (hi <= M) break;  // both at distinct roots
            hi = 1 + rs.uniform_index(hi - 1);
        }
        same += a == b;
    }
    const double p = double(same) / double(replicates);
    const double se = std::sqrt(std::fmax(p * (1.0 - p), 0.0) / double(replicates));
    return {p, se, 2.0 / (double(M) + 1.0), replicates};
}

CouplingReport coupling_condition_holds(double gamma, double c,
                                        const std::function<double(double)>& T_rule, double r,
                                        std::span<const double> N_sweep) {
    if (!(gamma > 0) || !(c > 0) || N_sweep.empty())
        throw std::invalid_argument("coupling_condition_holds: bad arguments");
    CouplingReport rep;
    for (double N : N_sweep) {
        const double T = T_rule(N);
        rep.rows.push_back({N, T, std::pow(N, r + 2.0) * c * std::exp(-gamma * T),
                            std::log(N) / T});
    }
    const auto& rows = rep.rows;
    rep.holds = rows.back().value < rows.front().value && rows.back().value < 1.0;
    rep.logN_condition = rows.back().logN_over_TN < rows.front().logN_over_TN;
    return rep;
}

}  // namespace dormcoal
