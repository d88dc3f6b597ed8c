#pragma once

#include <cmath>
#include <cstdint>

namespace jacobi::rng {

/// splitmix64 finalizer; full-avalanche 64-bit mixer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Stateless counter-based generator. Every variate is a pure function of
/// (seed, stream, counter), so simulations are reproducible bit-for-bit no
/// matter how paths are scheduled across threads.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : base_(mix64(mix64(seed) ^ stream)) {}

    /// Uniform draw in (0, 1]; never returns 0 so logs stay finite.
    double uniform(std::uint64_t counter) const {
        std::uint64_t h = mix64(base_ ^ counter);
        return static_cast<double>((h >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (cosine branch); consumes counters 2k, 2k+1.
    double normal(std::uint64_t k) const {
        double u1 = uniform(2 * k);
        double u2 = uniform(2 * k + 1);
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
    }

  private:
    std::uint64_t base_;
};

} // namespace jacobi::rng
