#pragma once

#include <cstdint>

// Counter-keyed random number generation.  Every variate is a pure function
// of (seed, stream, counter), so paths can be produced in any order, by any
// number of workers, with identical results.

namespace sdelab::rng {

// 64-bit finalizer used as the mixing primitive (splitmix64 finalizer).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Keyed word: hash of the (seed, stream, counter) triple.  Two finalizer
// rounds on the counter word so neighbouring counters decorrelate fully.
inline std::uint64_t keyed_word(std::uint64_t seed, std::uint64_t stream,
                                std::uint64_t counter) {
    std::uint64_t h = mix64(seed ^ 0x53de1ff3709715a5ULL);
    h = mix64(h ^ stream);
    return mix64(mix64(h ^ counter));
}

// Uniform in the open interval (0, 1): top 52 bits plus a half-ulp offset,
// so 0 and 1 are never produced and the inverse normal CDF stays finite.
// The 52-bit form keeps the sum exact; with 53 bits the all-ones word
// would round up to 1.0.
inline double uniform01(std::uint64_t word) {
    return (static_cast<double>(word >> 12) + 0.5) * 0x1.0p-52;
}

// Inverse of the standard normal CDF (Wichura's PPND16 rational
// approximation, accurate to ~1e-15 over the full open interval).
double inverse_normal_cdf(double p);

// Standard normal draw keyed by (seed, stream, counter).
inline double normal(std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t counter) {
    return inverse_normal_cdf(uniform01(keyed_word(seed, stream, counter)));
}

}
