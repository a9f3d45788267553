#include "dormcoal/genealogy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "dormcoal/forward.hpp"
#include "dormcoal/hypergeom.hpp"
#include "dormcoal/special.hpp"

namespace dormcoal {

AncestralStepResult ancestral_step(const Partition& p,
                                   std::span<const std::uint32_t> block_parent) {
    if (block_parent.size() != std::size_t(p.block_count()))
        throw std::invalid_argument("ancestral_step: one parent label per block required");
    std::map<std::uint32_t, std::vector<int>> by_parent;
    for (std::size_t i = 0; i < block_parent.size(); ++i)
        by_parent[block_parent[i]].push_back(int(i));
    AncestralStepResult out;
    std::vector<std::vector<int>> merge_sets;
    for (auto& [parent, ids] : by_parent)
        if (ids.size() >= 2) {
            out.merger_sizes.push_back(int(ids.size()));
            merge_sets.push_back(std::move(ids));
        }
    out.partition = p.merge_blocks(merge_sets);
    return out;
}

namespace {

// Draws the parents of the current representatives on one "active" day of a
// summerless class model: K >= 1 active wakers with geometric families, the
// other N-K families are singletons. Representatives sample parents without
// replacement from that urn; two representatives merge iff they land in the
// same active family (singleton parents are necessarily distinct).
// Returns parent labels: active family j -> j, singletons -> K + running id.
std::vector<std::uint32_t> active_day_parents(std::uint64_t N, const ActivationClasses& cls,
                                              int b, RandomStream& rs) {
    const std::uint64_t K = rs.binomial_at_least_one(N, cls.active_weight);
    std::vector<std::uint64_t> fam(K);
    std::vector<double> weights(cls.active.size());
    for (std::size_t j = 0; j < weights.size(); ++j)
        weights[j] = cls.active[j].weight / cls.active_weight;
    std::uint64_t active_total = 0;
    for (std::uint64_t j = 0; j < K; ++j) {
        const auto& c = cls.active[rs.categorical(weights)];
        fam[j] = rs.geometric_from_growth(c.growth);
        active_total += fam[j];
    }
    std::uint64_t singles = N - K;
    std::uint64_t total = active_total + singles;
    std::vector<std::uint32_t> parents(static_cast<std::size_t>(b));
    std::uint32_t next_single = std::uint32_t(K);
    for (int i = 0; i < b; ++i) {
        std::uint64_t v = rs.uniform_index(total);
        if (v < active_total) {
            std::uint64_t cum = 0;
            for (std::uint64_t j = 0; j < K; ++j) {
                cum += fam[j];
                if (v < cum) {
                    parents[std::size_t(i)] = std::uint32_t(j);
                    --fam[j];
                    --active_total;
                    break;
                }
            }
        } else {
            parents[std::size_t(i)] = next_single++;
            --singles;
        }
        --total;
    }
    return parents;
}

// Parents of the representatives on a generic day: draw the full family-size
// vector, then b distinct individuals weighted by family size (rejection on
// the rare individual collision keeps it exact).
std::vector<std::uint32_t> generic_day_parents(const ModelConfig& cfg, int b,
                                               RandomStream& rs) {
    const auto tau = sample_wake_times(cfg.wake, cfg.N, cfg.t_spring, rs);
    OffspringVector x = simulate_spring(cfg, tau, rs);
    x = simulate_summer(x, cfg.summer_length(), cfg.lambda, rs);
    std::vector<std::uint64_t> cum(x.x.size());
    std::uint64_t run = 0;
    for (std::size_t i = 0; i < x.x.size(); ++i) cum[i] = (run += x.x[i]);
    std::vector<std::uint64_t> taken;
    std::vector<std::uint32_t> parents(static_cast<std::size_t>(b));
    for (int i = 0; i < b; ++i) {
        std::uint64_t v;
        do {
            v = rs.uniform_index(x.total);
        } while (std::find(taken.begin(), taken.end(), v) != taken.end());
        taken.push_back(v);
        const auto it = std::upper_bound(cum.begin(), cum.end(), v);
        parents[std::size_t(i)] = std::uint32_t(it - cum.begin());
    }
    return parents;
}

}  // namespace

AncestralTrajectory run_ancestral_process(int n, const ModelConfig& cfg, long horizon,
                                          RandomStream& rs, GenealogyMode mode) {
    cfg.validate();
    if (n < 1 || std::uint64_t(n) > cfg.N)
        throw std::invalid_argument("run_ancestral_process: need 1 <= n <= N");
    AncestralTrajectory traj;
    traj.n = n;
    Partition p = Partition::singletons(n);
    traj.events.emplace_back(0, p);
    // Representatives: the sampled individuals occupy slots 0..n-1 (slot labels
    // are exchangeable within a generation). Only full_record mode needs them.
    std::vector<std::uint32_t> reps(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) reps[std::size_t(i)] = std::uint32_t(i);

    const auto classes = mode == GenealogyMode::lineage ? activation_classes(cfg)
                                                        : std::nullopt;
    const double p_active =
        classes ? -std::expm1(double(cfg.N) * std::log1p(-classes->active_weight)) : 0.0;

    long day = 0;
    while (day < horizon && !p.single_block()) {
        std::vector<std::uint32_t> block_parent;
        if (mode == GenealogyMode::full_record) {
            const GenerationRecord rec = step_generation(cfg, rs);
            ++day;
            block_parent.resize(std::size_t(p.block_count()));
            for (std::size_t i = 0; i < block_parent.size(); ++i)
                block_parent[i] = rec.parent_of[reps[i]];
        } else if (classes) {
            if (!(classes->active_weight > 0)) break;  // degenerate law never merges
            // Days with no active waker are all-singleton permutation days:
            // jump straight to the next active day.
            const long jump = 1 + (long)(rs.exponential() / -std::log1p(-p_active));
            day += jump;
            if (day > horizon) {
                day = horizon;
                break;
            }
            block_parent = active_day_parents(cfg.N, *classes, p.block_count(), rs);
        } else {
            ++day;
            block_parent = generic_day_parents(cfg, p.block_count(), rs);
        }
        AncestralStepResult step = ancestral_step(p, block_parent);
        if (!step.merger_sizes.empty()) {
            traj.merger_log.push_back({day, step.merger_sizes});
            traj.events.emplace_back(day, step.partition);
            if (mode == GenealogyMode::full_record) {
                // Each new block's representative is the parent of any old
                // block inside it; map old blocks via least elements.
                std::vector<std::uint32_t> new_reps;
                new_reps.reserve(std::size_t(step.partition.block_count()));
                // old block index by least element
                std::map<int, std::size_t> old_by_least;
                for (std::size_t i = 0; i < p.blocks().size(); ++i)
                    old_by_least[p.blocks()[i].front()] = i;
                for (const auto& nb : step.partition.blocks()) {
                    const std::size_t oi = old_by_least.at(nb.front());
                    new_reps.push_back(block_parent[oi]);
                }
                reps = std::move(new_reps);
            }
        } else if (mode == GenealogyMode::full_record) {
            for (std::size_t i = 0; i < reps.size(); ++i) reps[i] = block_parent[i];
        }
        p = step.partition;
    }
    traj.days = day;
    traj.absorbed = p.single_block();
    return traj;
}

namespace {

struct MeanAcc {
    double sum = 0.0;
    double sumsq = 0.0;
    std::uint64_t n = 0;
    void add(double v) {
        sum += v;
        sumsq += v * v;
        ++n;
    }
    double mean() const { return n ? sum / double(n) : 0.0; }
    double std_error() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double var = std::fmax(0.0, (sumsq - double(n) * m * m) / double(n - 1));
        return std::sqrt(var / double(n));
    }
};

// One draw of S_bar = sum of the other N-1 family sizes under a summerless
// class model.
std::uint64_t draw_sbar(std::uint64_t others, const ActivationClasses& cls,
                        std::span<const double> class_pmf, RandomStream& rs) {
    std::uint64_t sbar = others;
    if (cls.active_weight > 0) {
        const std::uint64_t K = rs.binomial(others, cls.active_weight);
        for (std::uint64_t j = 0; j < K; ++j) {
            const auto& c = cls.active[rs.categorical(class_pmf)];
            sbar += rs.geometric_from_growth(c.growth) - 1;
        }
    }
    return sbar;
}

}  // namespace

CnEstimate estimate_cN(const ModelConfig& cfg, std::uint64_t replicates, RandomStream& rs,
                       CnMethod method) {
    cfg.validate();
    if (replicates < 1) throw std::invalid_argument("estimate_cN: replicates must be >= 1");
    const double N = double(cfg.N);
    MeanAcc acc;
    const auto classes =
        method == CnMethod::factorial_moment ? activation_classes(cfg) : std::nullopt;
    if (classes) {
        // Stratified identity: c_N = N sum_j w_j E[(G_j)_2/(G_j+S_bar)_2 | class j];
        // the trivial class contributes zero because X = 1 there.
        if (!(classes->active_weight > 0)) return {0.0, 0.0, replicates, method};
        std::vector<double> class_pmf(classes->active.size());
        for (std::size_t j = 0; j < class_pmf.size(); ++j)
            class_pmf[j] = classes->active[j].weight / classes->active_weight;
        for (std::uint64_t r = 0; r < replicates; ++r) {
            const std::uint64_t sbar = draw_sbar(cfg.N - 1, *classes, class_pmf, rs);
            double v = 0.0;
            for (const auto& c : classes->active) {
                const double g = double(rs.geometric_from_growth(c.growth));
                const double s = g + double(sbar);
                v += c.weight * (g * (g - 1.0)) / (s * (s - 1.0));
            }
            acc.add(N * v);
        }
        return {acc.mean(), acc.std_error(), replicates, method};
    }
    for (std::uint64_t r = 0; r < replicates; ++r) {
        if (method == CnMethod::factorial_moment) {
            const auto tau = sample_wake_times(cfg.wake, cfg.N, cfg.t_spring, rs);
            OffspringVector x = simulate_spring(cfg, tau, rs);
            x = simulate_summer(x, cfg.summer_length(), cfg.lambda, rs);
            const double s = double(x.total);
            double v = 0.0;
            for (const std::uint64_t xi : x.x)
                if (xi >= 2) v += double(xi) * (double(xi) - 1.0);
            acc.add(v / (s * (s - 1.0)));
        } else {
            const GenerationRecord rec = step_generation(cfg, rs);
            double v = 0.0;
            for (const std::uint64_t ni : *rec.x_total.nu)
                if (ni >= 2) v += double(ni) * (double(ni) - 1.0);
            acc.add(v / (N * (N - 1.0)));
        }
    }
    return {acc.mean(), acc.std_error(), replicates, method};
}

CnEstimate estimate_cN_from_pmf(std::span<const double> pmf, std::uint64_t N,
                                std::uint64_t replicates, RandomStream& rs, CnMethod method) {
    if (N < 2) throw std::invalid_argument("estimate_cN_from_pmf: N must be >= 2");
    MeanAcc acc;
    std::vector<std::uint64_t> x(N);
    for (std::uint64_t r = 0; r < replicates; ++r) {
        std::uint64_t total = 0;
        for (auto& xi : x) total += (xi = 1 + rs.categorical(pmf));
        if (method == CnMethod::factorial_moment) {
            const double s = double(total);
            double v = 0.0;
            for (const std::uint64_t xi : x)
                if (xi >= 2) v += double(xi) * (double(xi) - 1.0);
            acc.add(v / (s * (s - 1.0)));
        } else {
            std::uint64_t remaining_total = total, remaining_draws = N;
            double v = 0.0;
            for (std::uint64_t i = 0; i < N && remaining_draws > 0; ++i) {
                const std::uint64_t ni =
                    i + 1 == N ? remaining_draws
                               : rs.hypergeometric(remaining_total, x[i], remaining_draws);
                if (ni >= 2) v += double(ni) * (double(ni) - 1.0);
                remaining_total -= x[i];
                remaining_draws -= ni;
            }
            acc.add(v / (double(N) * (double(N) - 1.0)));
        }
    }
    return {acc.mean(), acc.std_error(), replicates, method};
}

namespace {

void check_pmf(std::span<const double> pmf, int N) {
    if (pmf.empty() || N < 1) throw std::invalid_argument("pmf enumeration: empty inputs");
    double s = 0.0;
    for (double p : pmf) {
        if (!(p >= 0)) throw std::invalid_argument("pmf enumeration: negative mass");
        s += p;
    }
    if (std::fabs(s - 1.0) > 1e-9)
        throw std::invalid_argument("pmf enumeration: pmf must sum to 1");
    const double count = std::pow(double(pmf.size()), double(N));
    if (count > 2e8)
        throw std::invalid_argument("pmf enumeration: support too large (" +
                                    std::to_string(count) + " outcomes)");
}

// Calls f(x, prob) for every outcome x in {1..m}^N.
template <class F>
void enumerate_outcomes(std::span<const double> pmf, int N, F&& f) {
    std::vector<int> x(std::size_t(N), 1);
    while (true) {
        double prob = 1.0;
        for (int v : x) prob *= pmf[std::size_t(v - 1)];
        if (prob > 0) f(x, prob);
        int i = 0;
        for (; i < N; ++i) {
            if (x[std::size_t(i)] < int(pmf.size())) {
                ++x[std::size_t(i)];
                break;
            }
            x[std::size_t(i)] = 1;
        }
        if (i == N) break;
    }
}

}  // namespace

double exact_cN_small(std::span<const double> pmf, int N) {
    check_pmf(pmf, N);
    long double acc = 0.0;
    enumerate_outcomes(pmf, N, [&](const std::vector<int>& x, double prob) {
        long long s = 0;
        for (int v : x) s += v;
        const long double x1 = x[0];
        acc += (long double)prob * (x1 * (x1 - 1.0L)) / ((long double)s * (s - 1.0L));
    });
    return double(N * acc);
}

double exact_multimoment_X(std::span<const double> pmf, int N, std::span<const int> ks) {
    check_pmf(pmf, N);
    if (ks.empty() || ks.size() > 2)
        throw std::invalid_argument("exact_multimoment: supports r in {1,2}");
    int ktot = 0;
    for (int k : ks) ktot += k;
    long double acc = 0.0;
    enumerate_outcomes(pmf, N, [&](const std::vector<int>& x, double prob) {
        long long s = 0;
        for (int v : x) s += v;
        long double num = 1.0;
        for (std::size_t r = 0; r < ks.size(); ++r)
            num *= (long double)falling_factorial(double(x[r]), ks[r]);
        if (num == 0) return;
        acc += (long double)prob * num /
               (long double)falling_factorial(double(s), ktot);
    });
    return double(acc);
}

double exact_multimoment_nu(std::span<const double> pmf, int N, std::span<const int> ks) {
    check_pmf(pmf, N);
    if (ks.empty() || ks.size() > 2)
        throw std::invalid_argument("exact_multimoment: supports r in {1,2}");
    int ktot = 0;
    for (int k : ks) ktot += k;
    long double acc = 0.0;
    enumerate_outcomes(pmf, N, [&](const std::vector<int>& x, double prob) {
        long long s = 0;
        for (int v : x) s += v;
        const long long sN = N;
        long double inner = 0.0;
        if (ks.size() == 1) {
            // E[(nu_1)_{k}] given X: enumerate the marginal hypergeometric law.
            for (long long v = 0; v <= std::min<long long>(x[0], sN); ++v) {
                const long double p =
                    (long double)(binomial(std::uint64_t(x[0]), std::uint64_t(v)) *
                                  binomial(std::uint64_t(s - x[0]), std::uint64_t(sN - v)) /
                                  binomial(std::uint64_t(s), std::uint64_t(sN)));
                inner += p * (long double)falling_factorial(double(v), ks[0]);
            }
        } else {
            const long long rest = s - x[0] - x[1];
            for (long long v1 = 0; v1 <= std::min<long long>(x[0], sN); ++v1)
                for (long long v2 = 0; v2 <= std::min<long long>(x[1], sN - v1); ++v2) {
                    if (sN - v1 - v2 > rest) continue;
                    const long double p =
                        (long double)(binomial(std::uint64_t(x[0]), std::uint64_t(v1)) *
                                      binomial(std::uint64_t(x[1]), std::uint64_t(v2)) *
                                      binomial(std::uint64_t(rest), std::uint64_t(sN - v1 - v2)) /
                                      binomial(std::uint64_t(s), std::uint64_t(sN)));
                    inner += p * (long double)falling_factorial(double(v1), ks[0]) *
                             (long double)falling_factorial(double(v2), ks[1]);
                }
        }
        acc += (long double)prob * inner;
    });
    return double(acc / (long double)falling_factorial(double(N), ktot));
}

std::vector<double> two_point_offspring_pmf(double omega, double geom_p, double tail_eps) {
    if (!(omega >= 0 && omega <= 1) || !(geom_p > 0 && geom_p <= 1))
        throw std::invalid_argument("two_point_offspring_pmf: bad parameters");
    std::vector<double> pmf;
    pmf.push_back((1.0 - omega) + omega * geom_p);
    double tail = omega * (1.0 - geom_p);  // P(X > 1)
    double term = omega * geom_p;
    while (tail > tail_eps && pmf.size() < 100000) {
        term *= (1.0 - geom_p);
        pmf.push_back(term);
        tail -= term;
    }
    double s = 0.0;
    for (double p : pmf) s += p;
    for (double& p : pmf) p /= s;
    return pmf;
}

}  // namespace dormcoal
