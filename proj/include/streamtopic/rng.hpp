#ifndef STREAMTOPIC_RNG_HPP
#define STREAMTOPIC_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace streamtopic {

/// Deterministic random source. Wraps std::mt19937_64 (whose raw output
/// is pinned by the standard) and does its own integer/real mapping, so
/// the same seed yields the same stream on every platform. The standard
/// distribution classes are implementation-defined and never used here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, n). n must be > 0. Rejection sampling, no
    /// modulo bias.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return v % n;
    }

    /// Uniform real in [0, 1) with 53 random bits.
    double unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Stable sub-seed for an independent stream, e.g. one per topic.
    static std::uint64_t derive(std::uint64_t seed, std::string_view tag) {
        std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
        for (unsigned char c : tag) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return splitmix64(seed ^ h);
    }

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace streamtopic

#endif
