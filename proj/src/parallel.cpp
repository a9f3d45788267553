#include "dormcoal/parallel.hpp"

#include <cmath>
#include <cstdlib>

namespace dormcoal {

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("DORMCOAL_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? int(hw) : 1;
}

double MomentSums::std_error() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = std::fmax(0.0, (sumsq - double(n) * m * m) / double(n - 1));
    return std::sqrt(var / double(n));
}

namespace {

template <class ChunkFn>
void run_chunked(std::uint64_t chunks, int workers, ChunkFn&& chunk_fn) {
    workers = resolve_workers(workers);
    if (workers <= 1 || chunks <= 1) {
        for (std::uint64_t c = 0; c < chunks; ++c) chunk_fn(c);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= chunks) return;
            chunk_fn(c);
        }
    };
    std::vector<std::thread> pool;
    const int nthreads = int(std::min<std::uint64_t>(std::uint64_t(workers), chunks));
    pool.reserve(std::size_t(nthreads));
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace

MomentSums parallel_mc(std::uint64_t seed, std::uint64_t replicates, int workers,
                       const std::function<double(RandomStream&)>& fn) {
    const std::uint64_t chunks = (replicates + kMcChunk - 1) / kMcChunk;
    std::vector<MomentSums> partial(chunks);
    run_chunked(chunks, workers, [&](std::uint64_t c) {
        RandomStream rs = derive_stream({seed, c});
        const std::uint64_t lo = c * kMcChunk;
        const std::uint64_t hi = std::min(replicates, lo + kMcChunk);
        for (std::uint64_t i = lo; i < hi; ++i) partial[c].add(fn(rs));
    });
    MomentSums out;
    for (const auto& p : partial) out.merge(p);
    return out;
}

std::vector<MomentSums> parallel_mc_vec(
    std::uint64_t seed, std::uint64_t replicates, int workers, std::size_t dims,
    const std::function<void(RandomStream&, std::vector<double>&)>& fn) {
    const std::uint64_t chunks = (replicates + kMcChunk - 1) / kMcChunk;
    std::vector<std::vector<MomentSums>> partial(chunks);
    run_chunked(chunks, workers, [&](std::uint64_t c) {
        RandomStream rs = derive_stream({seed, c});
        partial[c].resize(dims);
        std::vector<double> v(dims);
        const std::uint64_t lo = c * kMcChunk;
        const std::uint64_t hi = std::min(replicates, lo + kMcChunk);
        for (std::uint64_t i = lo; i < hi; ++i) {
            fn(rs, v);
            for (std::size_t d = 0; d < dims; ++d) partial[c][d].add(v[d]);
        }
    });
    std::vector<MomentSums> out(dims);
    for (const auto& p : partial)
        for (std::size_t d = 0; d < dims; ++d) out[d].merge(p[d]);
    return out;
}

void parallel_replicates(std::uint64_t seed, std::uint64_t count, int workers,
                         const std::function<void(std::uint64_t, RandomStream&)>& fn) {
    run_chunked(count, workers, [&](std::uint64_t r) {
        RandomStream rs = derive_stream({seed, r});
        fn(r, rs);
    });
}

}  // namespace dormcoal
