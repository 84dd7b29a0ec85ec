#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace dangerwatch {

/// Seeded random source with platform-independent draws.
///
/// std::mt19937_64 has a standard-mandated output sequence, but the standard
/// distributions do not, so every draw the engine makes goes through the
/// helpers below to keep replays byte-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi]; returns lo when the range is degenerate.
    double uniform(double lo, double hi) { return lo == hi ? lo : lo + (hi - lo) * uniform01(); }

    /// Uniform index in [0, n). n must be positive.
    std::size_t index(std::size_t n) {
        const std::uint64_t bound = n;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x = 0;
        do {
            x = gen_();
        } while (x >= limit);
        return static_cast<std::size_t>(x % bound);
    }

    bool bernoulli(double p) { return p >= 1.0 || (p > 0.0 && uniform01() < p); }

private:
    std::mt19937_64 gen_;
};

}  // namespace dangerwatch
