#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "stabexp/error.hpp"

namespace stabexp {

using Residue = std::uint32_t;

constexpr bool is_prime(std::uint64_t d) {
    if (d < 2) return false;
    for (std::uint64_t p = 2; p * p <= d; ++p)
        if (d % p == 0) return false;
    return true;
}

inline void require_prime(std::uint64_t d) {
    if (!is_prime(d)) throw std::invalid_argument("field size d=" + std::to_string(d) + " is not prime");
}

// Arithmetic in F_d for a prime d. All inputs are assumed reduced.
struct PrimeField {
    Residue d;

    constexpr Residue add(Residue a, Residue b) const { return static_cast<Residue>((a + b) % d); }
    constexpr Residue sub(Residue a, Residue b) const { return static_cast<Residue>((a + d - b) % d); }
    constexpr Residue neg(Residue a) const { return a == 0 ? 0 : d - a; }
    constexpr Residue mul(Residue a, Residue b) const {
        return static_cast<Residue>(static_cast<std::uint64_t>(a) * b % d);
    }
    constexpr Residue pow(Residue a, std::uint64_t e) const {
        Residue r = 1 % d;
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }
    // Fermat inverse; a must be nonzero.
    constexpr Residue inv(Residue a) const { return pow(a, d - 2); }
};

// d^e with an overflow guard against 2^63.
inline std::uint64_t checked_pow(std::uint64_t d, std::uint64_t e) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < e; ++i) {
        if (r > (std::uint64_t{1} << 62) / d) throw instance_too_large("d^e overflows 64 bits");
        r *= d;
    }
    return r;
}

}  // namespace stabexp
