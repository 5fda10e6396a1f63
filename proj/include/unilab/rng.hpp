#pragma once

#include <cstdint>

namespace unilab {

// SplitMix64. Small, fully specified, identical output on every platform,
// which is what the reproducibility contract needs. Also used to derive
// independent per-chunk seeds from a master seed: chunk c of a sampling
// task runs its own generator seeded with split_seed(master, c), so the
// sample stream is independent of how chunks are distributed over threads.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1), 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform double in [lo, hi).
    double next_double(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t counter) {
    // One extra mixing round so nearby counters give unrelated streams.
    SplitMix64 mix(master ^ (0xa0761d6478bd642fULL * (counter + 1)));
    return mix.next_u64();
}

} // namespace unilab
