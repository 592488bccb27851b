#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace promptfront {

// splitmix64; used to derive independent seeds from (seed, tag) pairs.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    return mix_seed(seed ^ mix_seed(tag));
}

// FNV-1a, 64-bit. Stable across platforms; used for dedup-key hashing and the
// simulated backend.
inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 14695981039346656037ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Deterministic random source. mt19937_64 output is standardized, and all
// derived draws below avoid std::*_distribution (whose sequences are
// implementation-defined), so identical seeds give identical streams on any
// platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform integer in [0, n). n must be >= 1. Rejects draws from the
    // incomplete top bucket to stay unbiased.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t x, r;
        do {
            x = engine_();
            r = x % n;
        } while (x - r > std::numeric_limits<std::uint64_t>::max() - (n - 1));
        return r;
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return unit() < p; }

private:
    std::mt19937_64 engine_;
};

} // namespace promptfront
