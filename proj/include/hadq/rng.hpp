#pragma once

#include <cmath>
#include <cstdint>

#include "errors.hpp"

namespace hadq {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

// Seeded, stream-indexed generator. Identical (seed, stream) pairs
// reproduce identical draws, independent of platform or thread schedule;
// replicas use disjoint stream indices. xoshiro256** core.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {
        std::uint64_t mix = seed ^ (0xD1B54A32D192ED03ULL * (stream + 1));
        s_[0] = detail::splitmix64(mix);
        s_[1] = detail::splitmix64(mix);
        s_[2] = detail::splitmix64(mix);
        s_[3] = detail::splitmix64(mix);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5ULL, 7) * 9ULL;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // 53-bit precision in [0, 1)
    double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    double exponential(double rate) {
        if (!(rate > 0.0)) throw InvalidParameters("exponential: rate must be positive");
        // 1 - uniform01() is in (0, 1], so the log is finite.
        return -std::log(1.0 - uniform01()) / rate;
    }

    std::uint64_t below(std::uint64_t bound) {
        // unbiased rejection
        std::uint64_t threshold = -bound % bound;
        for (;;) {
            std::uint64_t x = next_u64();
            if (x >= threshold) return x % bound;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t s_[4];
};

}  // namespace hadq
