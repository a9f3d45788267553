#include "dormcoal/forward.hpp"

#include <cassert>
#include <stdexcept>

namespace dormcoal {

void GenerationRecord::validate() const {
    x_spring.validate();
    x_total.validate();
    const std::size_t n = x_spring.x.size();
    if (wake_times.size() != n || parent_of.size() != n)
        throw std::logic_error("GenerationRecord: size mismatch");
    for (std::size_t i = 0; i < n; ++i)
        if (x_total.x[i] < x_spring.x[i])
            throw std::logic_error("GenerationRecord: summer shrank a family");
    if (!x_total.nu) throw std::logic_error("GenerationRecord: nu missing");
    std::vector<std::uint64_t> counts(n, 0);
    for (std::uint32_t p : parent_of) {
        if (p >= n) throw std::logic_error("GenerationRecord: parent label out of range");
        ++counts[p];
    }
    for (std::size_t i = 0; i < n; ++i)
        if (counts[i] != (*x_total.nu)[i])
            throw std::logic_error("GenerationRecord: parent_of multiset != nu");
}

std::vector<double> sample_wake_times(const WakeLaw& law, std::size_t n, double t_spring,
                                      RandomStream& rs) {
    law.validate(t_spring);
    std::vector<double> tau(n);
    for (std::size_t i = 0; i < n; ++i)
        tau[i] = t_spring - law.sample_wake_back(t_spring, rs);
    return tau;
}

OffspringVector simulate_spring(const ModelConfig& cfg, const std::vector<double>& wake_times,
                                RandomStream& rs) {
    if (wake_times.size() != cfg.N)
        throw std::invalid_argument("simulate_spring: |wake_times| != N");
    std::vector<std::uint64_t> x(cfg.N);
    for (std::size_t i = 0; i < cfg.N; ++i) {
        const double tau = wake_times[i];
        if (tau < 0 || tau > cfg.t_spring)
            throw std::invalid_argument("simulate_spring: wake time outside spring");
        x[i] = rs.geometric_from_growth(cfg.lambda * (cfg.t_spring - tau));
    }
    return OffspringVector::from_sizes(std::move(x));
}

OffspringVector simulate_summer(const OffspringVector& x_spring, double duration,
                                double lambda, RandomStream& rs) {
    if (duration < 0) throw std::invalid_argument("simulate_summer: duration must be >= 0");
    const double growth = lambda * duration;
    if (growth <= 0) return x_spring;
    std::vector<std::uint64_t> x(x_spring.x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::uint64_t sum = 0;
        for (std::uint64_t j = 0; j < x_spring.x[i]; ++j) {
            std::uint64_t g;
            try {
                g = rs.geometric_from_growth(growth);
            } catch (const std::overflow_error&) {
                throw std::overflow_error("simulate_summer: family " + std::to_string(i) +
                                          " overflows 62-bit count");
            }
            sum += g;
            if (sum >> 62)
                throw std::overflow_error("simulate_summer: family " + std::to_string(i) +
                                          " overflows 62-bit count");
        }
        x[i] = sum;
    }
    return OffspringVector::from_sizes(std::move(x));
}

SurvivorDraw sample_survivors(const OffspringVector& x, RandomStream& rs) {
    const std::uint64_t N = x.population_size();
    if (x.total < N) throw std::logic_error("sample_survivors: total < N");
    SurvivorDraw out;
    out.x = x;
    auto& nu = out.x.nu.emplace(N, 0);
    std::uint64_t remaining_total = x.total;
    std::uint64_t remaining_draws = N;
    for (std::uint64_t i = 0; i < N && remaining_draws > 0; ++i) {
        const std::uint64_t ni =
            i + 1 == N ? remaining_draws
                       : rs.hypergeometric(remaining_total, x.x[i], remaining_draws);
        nu[i] = ni;
        remaining_total -= x.x[i];
        remaining_draws -= ni;
    }
    out.parent_of.reserve(N);
    for (std::uint64_t i = 0; i < N; ++i)
        for (std::uint64_t j = 0; j < nu[i]; ++j) out.parent_of.push_back(std::uint32_t(i));
    rs.shuffle(out.parent_of);
    assert((out.x.validate(), true));
    return out;
}

GenerationRecord step_generation(const ModelConfig& cfg, RandomStream& rs) {
    GenerationRecord rec;
    rec.wake_times = sample_wake_times(cfg.wake, cfg.N, cfg.t_spring, rs);
    rec.x_spring = simulate_spring(cfg, rec.wake_times, rs);
    rec.x_total = simulate_summer(rec.x_spring, cfg.summer_length(), cfg.lambda, rs);
    SurvivorDraw sd = sample_survivors(rec.x_total, rs);
    rec.x_total = std::move(sd.x);
    rec.parent_of = std::move(sd.parent_of);
    assert((rec.validate(), true));
    return rec;
}

}  // namespace dormcoal
