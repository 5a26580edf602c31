#pragma once

#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>

namespace varkit {

/// Deterministic RNG wrapper. mt19937_64 output is fully specified by the
/// standard, and the [lo,hi) mapping below avoids the implementation-defined
/// std::uniform_real_distribution, so streams are reproducible across
/// platforms and toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) {
        const std::uint64_t bits = engine_() >> 11; // 53 random bits
        const double unit = static_cast<double>(bits) * 0x1.0p-53;
        return lo + (hi - lo) * unit;
    }

    /// Uniform integer in [lo, hi] inclusive.
    long long uniform_int(long long lo, long long hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<long long>(engine_() % span);
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

constexpr std::uint64_t kDefaultSeed = 0x5652ull;

/// Seed for randomized identity testing; VARKIT_SEED overrides the default.
inline std::uint64_t global_seed() {
    if (const char* env = std::getenv("VARKIT_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return static_cast<std::uint64_t>(v);
    }
    return kDefaultSeed;
}

} // namespace varkit
