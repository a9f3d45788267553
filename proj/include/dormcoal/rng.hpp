#ifndef DORMCOAL_RNG_HPP
#define DORMCOAL_RNG_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace dormcoal {

// Identifies one replicate's random stream. The stream is a pure function of
// (master_seed, replicate_index), so replicate-level parallelism cannot change
// any result.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t replicate_index = 0;
};

// SplitMix64 stream (Steele-Lea-Flood / Vigna). Documented contract:
//   state_{k+1} = state_k + 0x9E3779B97F4A7C15
//   output_k    = mix(state_{k+1})
// where mix is the xor-multiply finalizer below. Streams derived from distinct
// SeedSpecs start at finalizer-scrambled positions and are independent for all
// practical purposes. Single-consumer: do not share one stream across threads.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64();

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01();
    // Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos();
    // Exponential(rate) via inversion.
    double exponential(double rate = 1.0);
    bool bernoulli(double p);
    // Unbiased integer in [0, bound) (Lemire rejection).
    std::uint64_t uniform_index(std::uint64_t bound);

    // Geometric on {1,2,...} with success probability p = exp(-growth):
    // P(X = k) = p (1-p)^{k-1}. Inversion in log space; growth is lambda*dt, so
    // the success parameter never underflows silently. Throws std::overflow_error
    // when the sampled count cannot fit 62 bits (genuine count overflow).
    std::uint64_t geometric_from_growth(double growth);
    // Same law with p given directly.
    std::uint64_t geometric_ge1(double p);

    // Binomial(n, p) by inversion; splits recursively when n p is large so the
    // walk stays short. Exact in law.
    std::uint64_t binomial(std::uint64_t n, double p);
    // Binomial(n, p) conditioned on being >= 1.
    std::uint64_t binomial_at_least_one(std::uint64_t n, double p);

    // Number of marked items among `draws` taken without replacement from
    // `total` items of which `marked` are marked.
    std::uint64_t hypergeometric(std::uint64_t total, std::uint64_t marked,
                                 std::uint64_t draws);

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::uint64_t i = v.size(); i > 1; --i) {
            const std::uint64_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // Index draw from a finite pmf (linear scan; pmf sums to 1).
    std::size_t categorical(std::span<const double> pmf);

  private:
    std::uint64_t state_;
};

// Deterministic stream derivation:
//   s = mix(mix(master_seed ^ GAMMA) + (replicate_index + 1) * GAMMA)
// with GAMMA = 0x9E3779B97F4A7C15. Same spec -> identical stream, always.
RandomStream derive_stream(const SeedSpec& spec);

// Salts a master seed with a purpose tag so sub-experiments get independent
// stream families (FNV-1a of the tag XORed into the seed).
std::uint64_t salt_seed(std::uint64_t master_seed, const char* tag);

}  // namespace dormcoal

#endif
