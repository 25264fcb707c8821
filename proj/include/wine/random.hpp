#pragma once

// Seeded generator with platform-independent derived draws. The standard
// distributions are implementation-defined, which would break byte-identical
// reports across toolchains.

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace wine {

class rng {
public:
    explicit rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound), rejection-sampled.
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

/// Moves a uniform random sample of size `count` to the front of `items`.
template <typename T>
void partial_shuffle(std::vector<T>& items, std::size_t count, rng& gen) {
    for (std::size_t i = 0; i < count && i < items.size(); ++i) {
        const std::size_t j = i + static_cast<std::size_t>(gen.below(items.size() - i));
        std::swap(items[i], items[j]);
    }
}

/// Mixes a base seed with a stream index so independent sweep points get
/// independent, reproducible streams (splitmix64 finaliser).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace wine
