#pragma once

#include <cstdint>

namespace etcon {

/// xorshift64* generator.
///
/// State is seeded through one round of splitmix64 so that small seeds (0, 1,
/// 2, ...) give well-mixed streams. The constants are fixed so that seeded
/// runs reproduce bit-for-bit across implementations:
///   seed:  z = seed + 0x9E3779B97F4A7C15
///          z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///          z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///          state = z ^ (z >> 31)   (replaced by 1 if zero)
///   next:  s ^= s >> 12; s ^= s << 25; s ^= s >> 27
///          return s * 0x2545F4914F6CDD1D
///   uniform(): (next() >> 11) * 2^-53, in [0, 1)
class XorShift64Star {
public:
    explicit XorShift64Star(std::uint64_t seed) noexcept;

    std::uint64_t next() noexcept;
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    /// Integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) noexcept;
    /// Standard normal via Box-Muller.
    double normal() noexcept;

private:
    std::uint64_t state_;
};

}  // namespace etcon
