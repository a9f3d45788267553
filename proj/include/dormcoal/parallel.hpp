#ifndef DORMCOAL_PARALLEL_HPP
#define DORMCOAL_PARALLEL_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "dormcoal/rng.hpp"

namespace dormcoal {

// Resolves a worker count: explicit flag > DORMCOAL_WORKERS env > hardware.
int resolve_workers(int requested);

struct MomentSums {
    double sum = 0.0;
    double sumsq = 0.0;
    std::uint64_t n = 0;
    void add(double v) {
        sum += v;
        sumsq += v * v;
        ++n;
    }
    void merge(const MomentSums& o) {
        sum += o.sum;
        sumsq += o.sumsq;
        n += o.n;
    }
    double mean() const { return n ? sum / double(n) : 0.0; }
    double std_error() const;
};

// Deterministic parallel Monte Carlo: replicates are processed in fixed chunks
// of kChunk, chunk c drawing from derive_stream({seed, c}); partial sums are
// merged in chunk order, so the result is byte-identical for any worker count.
inline constexpr std::uint64_t kMcChunk = 4096;

// fn(stream, chunk_index, local_index) -> sample value.
MomentSums parallel_mc(std::uint64_t seed, std::uint64_t replicates, int workers,
                       const std::function<double(RandomStream&)>& fn);

// Vector-valued flavor: fn fills `out` (size dims); per-dimension sums returned.
std::vector<MomentSums> parallel_mc_vec(std::uint64_t seed, std::uint64_t replicates,
                                        int workers, std::size_t dims,
                                        const std::function<void(RandomStream&, std::vector<double>&)>& fn);

// Generic deterministic replicate map: calls fn(replicate_index, stream) for
// replicate indices [0, count); any worker count, same streams.
void parallel_replicates(std::uint64_t seed, std::uint64_t count, int workers,
                         const std::function<void(std::uint64_t, RandomStream&)>& fn);

}  // namespace dormcoal

#endif
