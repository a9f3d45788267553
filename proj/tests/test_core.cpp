#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "dormcoal/hypergeom.hpp"
#include "dormcoal/model.hpp"
#include "dormcoal/partition.hpp"
#include "dormcoal/quadrature.hpp"
#include "dormcoal/rng.hpp"
#include "dormcoal/special.hpp"

using namespace dormcoal;

TEST_CASE("log_gamma matches known values") {
    CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(M_PI)).epsilon(1e-13));
    CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-13));
    CHECK(log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(beta_function(2.5, 0.5) == doctest::Approx(1.1780972450961724).epsilon(1e-12));
}

TEST_CASE("incomplete gamma: chi-square tails") {
    // Classic quantiles.
    CHECK(chi_square_tail(1, 3.841458820694124) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(chi_square_tail(5, 11.070497693516351) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(gamma_p(2.0, 0.0) == 0.0);
    CHECK(gamma_p(2.0, 50.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("adaptive quadrature") {
    CHECK(integrate([](double x) { return x * x; }, 0, 1, 1e-12) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    // Integrable endpoint singularity.
    CHECK(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0, 1, 1e-9) ==
          doctest::Approx(2.0).epsilon(1e-8));
    // I(1,1,1) = 1 - e E_1(1), E_1(1) = 0.21938393439552027.
    CHECK(integral_power_ratio_exp(1, 1, 1.0, 1e-12) ==
          doctest::Approx(1.0 - std::exp(1.0) * 0.21938393439552027).epsilon(1e-10));
}

TEST_CASE("derive_stream determinism and distinctness") {
    RandomStream a = derive_stream({42, 0});
    RandomStream b = derive_stream({42, 0});
    RandomStream c = derive_stream({42, 1});
    RandomStream d = derive_stream({43, 0});
    bool c_differs = false, d_differs = false;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t va = a.next_u64();
        CHECK(va == b.next_u64());
        c_differs = c_differs || va != c.next_u64();
        d_differs = d_differs || va != d.next_u64();
    }
    CHECK(c_differs);
    CHECK(d_differs);
}

TEST_CASE("uniform, exponential, geometric sanity") {
    RandomStream rs = derive_stream({7, 0});
    const int n = 200000;
    double su = 0, se = 0, sg = 0;
    for (int i = 0; i < n; ++i) {
        su += rs.uniform01();
        se += rs.exponential();
        sg += double(rs.geometric_ge1(0.5));
    }
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(se / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(sg / n == doctest::Approx(2.0).epsilon(0.01));
    CHECK(rs.geometric_ge1(1.0) == 1);
    CHECK(rs.geometric_from_growth(0.0) == 1);
    CHECK_THROWS_AS(rs.geometric_from_growth(800.0), std::overflow_error);
}

TEST_CASE("geometric pmf is exact (chi-square)") {
    RandomStream rs = derive_stream({8, 0});
    const double p = 0.3;
    const int n = 1000000;
    std::vector<std::uint64_t> counts(12, 0);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t g = rs.geometric_ge1(p);
        counts[std::min<std::uint64_t>(g - 1, 11)]++;
    }
    double chi2 = 0.0;
    for (int k = 0; k < 12; ++k) {
        const double prob =
            k < 11 ? p * std::pow(1 - p, k) : std::pow(1 - p, 11);
        const double expd = prob * n;
        chi2 += (counts[std::size_t(k)] - expd) * (counts[std::size_t(k)] - expd) / expd;
    }
    CHECK(chi_square_tail(11, chi2) > 1e-4);
}

TEST_CASE("binomial inversion matches moments; conditioned variant is >= 1") {
    RandomStream rs = derive_stream({9, 0});
    const int n = 300000;
    double s = 0;
    for (int i = 0; i < n; ++i) s += double(rs.binomial(1000, 0.002));
    CHECK(s / n == doctest::Approx(2.0).epsilon(0.02));
    for (int i = 0; i < 1000; ++i) CHECK(rs.binomial_at_least_one(50, 1e-6) >= 1);
}

TEST_CASE("hypergeometric pmf, tail, and sampler agree") {
    // Hyp(total=10, marked=4, draws=5): P(k) = C(4,k) C(6,5-k) / C(10,5).
    const double denom = binomial(10, 5);
    for (std::uint64_t k = 0; k <= 4; ++k) {
        const double exact = binomial(4, k) * binomial(6, 5 - k) / denom;
        CHECK(hypergeometric_pmf(10, 4, 5, k) == doctest::Approx(exact).epsilon(1e-12));
    }
    double tail = 0;
    for (std::uint64_t k = 3; k <= 4; ++k) tail += hypergeometric_pmf(10, 4, 5, k);
    CHECK(hypergeometric_tail(10, 4, 5, 2) == doctest::Approx(tail).epsilon(1e-12));
    CHECK(hypergeometric_tail(10, 4, 5, 4) == 0.0);
    CHECK(hypergeometric_tail(10, 4, 5, 0) < 1.0);

    RandomStream rs = derive_stream({10, 0});
    const int n = 400000;
    std::vector<std::uint64_t> counts(5, 0);
    for (int i = 0; i < n; ++i) counts[rs.hypergeometric(10, 4, 5)]++;
    double chi2 = 0;
    for (std::uint64_t k = 0; k <= 4; ++k) {
        const double expd = hypergeometric_pmf(10, 4, 5, k) * n;
        chi2 += (counts[k] - expd) * (counts[k] - expd) / expd;
    }
    CHECK(chi_square_tail(4, chi2) > 1e-4);
}

TEST_CASE("hypergeometric handles huge totals") {
    // marked/total = 1/2 with astronomical counts: mean draws/2.
    RandomStream rs = derive_stream({11, 0});
    const std::uint64_t total = std::uint64_t(1) << 61;
    double s = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) s += double(rs.hypergeometric(total, total / 2, 100));
    CHECK(s / n == doctest::Approx(50.0).epsilon(0.02));
    CHECK(hypergeometric_tail(total, total / 2, 100, 49) ==
          doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("partition canonicalization is order-insensitive and unique") {
    const Partition a = Partition::from_blocks(5, {{3, 1}, {2, 5}, {4}});
    const Partition b = Partition::from_blocks(5, {{5, 2}, {4}, {1, 3}});
    CHECK(a == b);
    CHECK(a.str() == "{1,3}{2,5}{4}");
    CHECK(Partition::from_blocks(5, a.blocks()) == a);  // idempotent
    CHECK_THROWS_AS(Partition::from_blocks(3, {{1, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(Partition::from_blocks(3, {{1, 2}, {2, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(Partition::from_blocks(3, {{1, 2}, {4}}), std::invalid_argument);
}

TEST_CASE("partition_merge: spec examples") {
    const Partition p3 = Partition::singletons(3);
    CHECK(p3.merge_blocks({}) == p3);
    CHECK(p3.merge_blocks({{0, 1, 2}}).str() == "{1,2,3}");
    const Partition p4 = Partition::singletons(4);
    CHECK(p4.merge_blocks({{0, 1}, {2, 3}}).str() == "{1,2}{3,4}");
    CHECK_THROWS_AS(p4.merge_blocks({{0, 1}, {1, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(p4.merge_blocks({{0, 7}}), std::invalid_argument);
}

TEST_CASE("partition_merge block-count law (property)") {
    RandomStream rs = derive_stream({12, 0});
    for (int iter = 0; iter < 200; ++iter) {
        const int n = 2 + int(rs.uniform_index(10));
        // random partition: assign each element a bucket
        std::vector<std::vector<int>> buckets(static_cast<std::size_t>(n));
        for (int e = 1; e <= n; ++e) buckets[rs.uniform_index(std::uint64_t(n))].push_back(e);
        std::vector<std::vector<int>> blocks;
        for (auto& b : buckets)
            if (!b.empty()) blocks.push_back(b);
        const Partition p = Partition::from_blocks(n, blocks);
        // random disjoint merge sets
        std::vector<int> ids(static_cast<std::size_t>(p.block_count()));
        for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = int(i);
        rs.shuffle(ids);
        std::vector<std::vector<int>> sets;
        std::size_t pos = 0;
        int expected_drop = 0;
        while (pos + 1 < ids.size() && rs.bernoulli(0.6)) {
            const std::size_t take = 2 + rs.uniform_index(2);
            if (pos + take > ids.size()) break;
            sets.emplace_back(ids.begin() + std::ptrdiff_t(pos),
                              ids.begin() + std::ptrdiff_t(pos + take));
            expected_drop += int(take) - 1;
            pos += take;
        }
        const Partition q = p.merge_blocks(sets);
        CHECK(q.block_count() == p.block_count() - expected_drop);
        CHECK(q.leaf_count() == n);
    }
}

TEST_CASE("OffspringVector invariants") {
    auto v = OffspringVector::from_sizes({3, 1, 2});
    CHECK(v.total == 6);
    v.validate();
    v.nu = std::vector<std::uint64_t>{2, 0, 1};
    v.validate();
    v.nu = std::vector<std::uint64_t>{2, 1, 1};
    CHECK_THROWS_AS(v.validate(), std::logic_error);
    CHECK_THROWS_AS(OffspringVector::from_sizes({1, 0, 2}), std::logic_error);
}

TEST_CASE("wake law validation and sampling support") {
    CHECK_THROWS_AS(WakeLaw::two_point(1.5, 0.0).validate(1.0), std::invalid_argument);
    CHECK_THROWS_AS(WakeLaw::two_point(0.5, 2.0).validate(1.0), std::invalid_argument);
    CHECK_THROWS_AS(WakeLaw::mixture({{0.5, 0.7}, {0.2, 0.2}}).validate(1.0),
                    std::invalid_argument);
    WakeLaw::mixture({{0.5, 0.7}, {0.2, 0.3}}).validate(1.0);

    // Exponential tail: survival P(zeta > y) = min(1, c e^{-gamma y}).
    RandomStream rs = derive_stream({13, 0});
    const WakeLaw law = WakeLaw::exponential_tail(2.0, 3.0, 10.0);
    const double y0 = std::log(3.0) / 2.0;
    int above = 0, at_floor = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double sigma = law.sample_wake_back(10.0, rs);
        if (sigma > 1.0) ++above;
        if (sigma < y0 - 1e-12) ++at_floor;
    }
    CHECK(at_floor == 0);  // floor-at-1 law: no mass below y0 when c > 1
    CHECK(double(above) / n == doctest::Approx(3.0 * std::exp(-2.0)).epsilon(0.03));

    // c < 1 puts an atom of mass 1 - c at zero.
    const WakeLaw law2 = WakeLaw::exponential_tail(1.0, 0.25, 10.0);
    int zero = 0;
    for (int i = 0; i < n; ++i) zero += law2.sample_wake_back(10.0, rs) == 0.0;
    CHECK(double(zero) / n == doctest::Approx(0.75).epsilon(0.01));
}

TEST_CASE("model config validation names fields") {
    ModelConfig cfg{100, 1.0, 5.0, 5.0, WakeLaw::two_point(0.01, 5.0)};
    cfg.validate();
    cfg.t_total = 4.0;
    CHECK_THROWS_WITH_AS(cfg.validate(), "t_total: must be >= t_spring", std::invalid_argument);
    cfg.t_total = 5.0;
    cfg.t_spring = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    // growth budget: bounded wake-back with absurd rate is rejected up front
    ModelConfig big{100, 10.0, 50.0, 50.0, WakeLaw::two_point(0.01, 50.0)};
    CHECK_THROWS_AS(big.validate(), std::invalid_argument);
}

TEST_CASE("activation classes decompose discrete laws") {
    ModelConfig cfg{100, 1.0, 5.0, 5.0, WakeLaw::two_point(0.01, 5.0)};
    const auto cls = activation_classes(cfg);
    REQUIRE(cls.has_value());
    CHECK(cls->trivial_weight == doctest::Approx(0.99));
    REQUIRE(cls->active.size() == 1);
    CHECK(cls->active[0].sigma == doctest::Approx(5.0));
    CHECK(cls->active[0].weight == doctest::Approx(0.01));

    // Summer present: no class decomposition.
    ModelConfig with_summer{100, 1.0, 5.0, 6.0, WakeLaw::two_point(0.01, 5.0)};
    CHECK_FALSE(activation_classes(with_summer).has_value());
    // Continuous law: no decomposition.
    ModelConfig expo{100, 1.0, 5.0, 5.0, WakeLaw::exponential_tail(1.0, 1.0, 5.0)};
    CHECK_FALSE(activation_classes(expo).has_value());
    // Degenerate at t_spring: everything trivial.
    ModelConfig degen{100, 1.0, 5.0, 5.0, WakeLaw::degenerate(5.0)};
    const auto dcls = activation_classes(degen);
    REQUIRE(dcls.has_value());
    CHECK(dcls->active_weight == 0.0);
    CHECK(dcls->trivial_weight == doctest::Approx(1.0));
}
