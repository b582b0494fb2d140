#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace stabexp {

using Engine = std::mt19937_64;

// Uniform integer in [0, bound) by rejection on raw engine output. Unlike
// std::uniform_int_distribution the result sequence is fixed across standard
// library implementations, which keeps seeded CLI runs reproducible.
template <class URBG>
std::uint64_t uniform_below(URBG& rng, std::uint64_t bound) {
    static_assert(URBG::min() == 0 && URBG::max() == std::numeric_limits<std::uint64_t>::max());
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

// Uniform double in [0, 1) with 53 random bits.
template <class URBG>
double uniform_unit(URBG& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace stabexp
