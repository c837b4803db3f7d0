#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace memkin {

/// One round of the splitmix64 output function. Used to derive independent
/// stream seeds from a (seed, stream index) pair.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Counter-based random stream: stream(seed, i) is statistically independent of
/// stream(seed, j) for i != j and depends only on (seed, i), so ensembles can be
/// evaluated in any order (or in parallel) with bit-identical results.
///
/// Uniform doubles are produced from raw engine bits rather than
/// std::uniform_real_distribution, whose output is implementation-defined.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x7f4a7c15ull))) {}

    /// Uniform double in [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in the closed interval [lo, hi].
    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    /// Exponential variate with the given rate (mean 1/rate).
    double exponential(double rate) {
        // uniform() < 1 strictly, so log1p argument stays > -1 and the result is finite.
        return -std::log1p(-uniform()) / rate;
    }

    std::uint64_t raw() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace memkin
