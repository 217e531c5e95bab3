#ifndef KMSELECT_RNG_HPP
#define KMSELECT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace kmselect {

// SplitMix64: the pinned 64-bit generator used everywhere randomness is
// needed. Chosen so that results are bit-identical across platforms and
// standard libraries; std::mt19937 + std::*_distribution would not be.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Unbiased uniform in {0, ..., bound-1} (rejection sampling).
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
        const std::uint64_t threshold = (0ULL - bound) % bound;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // Standard normal via Box-Muller; second value of each pair is cached.
    double next_gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = next_double();
        // u1 == 0 would blow up the log
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        cached_ = radius * std::sin(angle);
        have_cached_ = true;
        return radius * std::cos(angle);
    }

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// Derives an independent seed for a named stream of a replicate. This is the
// documented splitmix-style jump used for per-replicate seeding: feed the
// (base, stream) pair through one extra scrambling round each.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    SplitMix64 g(base ^ (0x6A09E667F3BCC909ULL + stream * 0x9E3779B97F4A7C15ULL));
    g.next();
    return g.next();
}

// First K entries of a partial Fisher-Yates shuffle of {0, ..., n-1}:
// K distinct indices, order-significant, deterministic in (n, K, seed).
inline std::vector<int> sample_without_replacement(int n, int k, std::uint64_t seed) {
    if (k < 0 || k > n) throw std::invalid_argument("sample_without_replacement: need 0 <= k <= n");
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    SplitMix64 gen(seed);
    for (int j = 0; j < k; ++j) {
        const auto offset = static_cast<int>(gen.next_below(static_cast<std::uint64_t>(n - j)));
        std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(j + offset)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    return pool;
}

} // namespace kmselect

#endif
