#pragma once

#include <cstdint>
#include <random>

#include "cross/gaussian.hpp"

namespace cross {

/// Mixing function used to derive per-run seeds from a master seed.
/// splitmix64 finalizer; run index k maps to splitmix64(master + (k+1)*golden).
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic stochastic source. All randomness in the project flows
/// through this class so that runs are reproducible from a single seed:
/// mt19937_64 raw bits, uniforms in the open interval (0,1), and normals
/// via the inverse CDF (no rejection, fixed draw count per call).
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    /// Uniform draw strictly inside (0,1).
    double uniform01() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via the inverse CDF; exactly one engine call.
    double normal() { return normal_quantile(uniform01()); }

private:
    std::mt19937_64 engine_;
};

}  // namespace cross
