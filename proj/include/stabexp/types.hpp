#pragma once

// Method of types over the alphabet X = F_d x F_d. Symbols are flattened as
// (i, j) -> i*d + j. Logarithms take an explicit base; the rest of the
// library always passes base d.

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "stabexp/error.hpp"
#include "stabexp/field.hpp"
#include "stabexp/numeric.hpp"
#include "stabexp/symplectic.hpp"

namespace stabexp {

inline constexpr double kProbabilitySumTolerance = 1e-12;

// Probability distribution P on F_d x F_d, the parameters of the Pauli-mixture
// channel A ~ { sqrt(P(u)) N_u }.
class NoiseDistribution {
public:
    NoiseDistribution(Residue d, std::vector<double> probs) : d_(d), probs_(std::move(probs)) {
        require_prime(d);
        if (probs_.size() != static_cast<std::size_t>(d) * d)
            throw std::invalid_argument("expected d^2 = " + std::to_string(d * d) + " probabilities, got " +
                                        std::to_string(probs_.size()));
        CompensatedSum total;
        for (double p : probs_) {
            if (!std::isfinite(p) || p < 0.0) throw std::invalid_argument("probabilities must be finite and >= 0");
            total += p;
        }
        if (std::abs(total.value() - 1.0) > kProbabilitySumTolerance)
            throw std::invalid_argument("probabilities sum to " + std::to_string(total.value()) + ", not 1");
    }

    static NoiseDistribution point_mass(Residue d) {
        std::vector<double> p(static_cast<std::size_t>(d) * d, 0.0);
        p[0] = 1.0;
        return {d, std::move(p)};
    }

    static NoiseDistribution uniform(Residue d) {
        const std::size_t s = static_cast<std::size_t>(d) * d;
        return {d, std::vector<double>(s, 1.0 / static_cast<double>(s))};
    }

    Residue d() const { return d_; }
    std::size_t alphabet_size() const { return probs_.size(); }
    std::span<const double> probs() const { return probs_; }
    double operator[](std::size_t symbol) const { return probs_[symbol]; }
    double at(Residue i, Residue j) const { return probs_[static_cast<std::size_t>(i) * d_ + j]; }

    friend bool operator==(const NoiseDistribution&, const NoiseDistribution&) = default;

private:
    Residue d_;
    std::vector<double> probs_;
};

// Empirical distribution of a length-n sequence, kept as exact counts.
class EmpiricalType {
public:
    explicit EmpiricalType(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {
        if (counts_.empty()) throw std::invalid_argument("empty alphabet");
        n_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
        if (n_ == 0) throw std::invalid_argument("a type needs n >= 1");
    }

    std::uint64_t n() const { return n_; }
    std::size_t alphabet_size() const { return counts_.size(); }
    std::span<const std::uint64_t> counts() const { return counts_; }
    std::uint64_t count(std::size_t symbol) const { return counts_[symbol]; }
    double probability(std::size_t symbol) const {
        return static_cast<double>(counts_[symbol]) / static_cast<double>(n_);
    }
    std::vector<double> probabilities() const {
        std::vector<double> q(counts_.size());
        for (std::size_t u = 0; u < q.size(); ++u) q[u] = probability(u);
        return q;
    }

    friend bool operator==(const EmpiricalType&, const EmpiricalType&) = default;
    friend auto operator<=>(const EmpiricalType& a, const EmpiricalType& b) { return a.counts_ <=> b.counts_; }

private:
    std::vector<std::uint64_t> counts_;
    std::uint64_t n_ = 0;
};

inline EmpiricalType type_of(std::span<const std::size_t> symbols, std::size_t alphabet_size) {
    if (symbols.empty()) throw std::invalid_argument("type of an empty sequence");
    std::vector<std::uint64_t> counts(alphabet_size, 0);
    for (auto s : symbols) {
        if (s >= alphabet_size) throw std::invalid_argument("symbol outside the alphabet");
        ++counts[s];
    }
    return EmpiricalType(std::move(counts));
}

// Type of x = ((u_1, v_1), ..., (u_n, v_n)) as a sequence over F_d^2.
inline EmpiricalType type_of(const SymplecticVector& x) {
    const std::size_t s = static_cast<std::size_t>(x.d()) * x.d();
    std::vector<std::uint64_t> counts(s, 0);
    for (std::size_t i = 0; i < x.n(); ++i) ++counts[x.symbol(i)];
    return EmpiricalType(std::move(counts));
}

// C(n + s - 1, s - 1), the number of types of length n over s symbols.
inline BigInt composition_count(std::uint64_t n, std::size_t alphabet_size) {
    BigInt r = 1;
    for (std::size_t i = 1; i < alphabet_size; ++i) {
        r *= n + i;
        r /= i;
    }
    return r;
}

// All types of length n over `alphabet_size` symbols, lexicographic in the count vector.
inline std::vector<EmpiricalType> enumerate_types(std::uint64_t n, std::size_t alphabet_size,
                                                  std::uint64_t max_count = 10'000'000) {
    if (n == 0 || alphabet_size == 0) throw std::invalid_argument("enumerate_types needs n >= 1 and a nonempty alphabet");
    const BigInt total = composition_count(n, alphabet_size);
    if (total > max_count) throw instance_too_large("type count " + total.str() + " exceeds cap");

    std::vector<EmpiricalType> out;
    out.reserve(static_cast<std::size_t>(total));
    std::vector<std::uint64_t> c(alphabet_size, 0);
    // Depth-first over count vectors with the last entry absorbing the remainder.
    auto rec = [&](auto&& self, std::size_t pos, std::uint64_t left) -> void {
        if (pos + 1 == alphabet_size) {
            c[pos] = left;
            out.emplace_back(c);
            return;
        }
        for (std::uint64_t k = 0; k <= left; ++k) {
            c[pos] = k;
            self(self, pos + 1, left - k);
        }
    };
    rec(rec, 0, n);
    return out;
}

// H(Q) = -sum Q log_base Q with 0 log 0 = 0.
inline double entropy(std::span<const double> q, double base) {
    const double ln_base = std::log(base);
    double h = 0.0;
    for (double x : q)
        if (x > 0.0) h -= x * std::log(x);
    return h / ln_base;
}

inline double entropy(const EmpiricalType& q, double base) { return entropy(q.probabilities(), base); }

// D(Q || P); +infinity when Q charges a symbol that P does not.
inline double divergence(std::span<const double> q, std::span<const double> p, double base) {
    if (q.size() != p.size()) throw std::invalid_argument("divergence over different alphabets");
    double acc = 0.0;
    for (std::size_t u = 0; u < q.size(); ++u) {
        if (q[u] <= 0.0) continue;
        if (p[u] <= 0.0) return std::numeric_limits<double>::infinity();
        acc += q[u] * std::log(q[u] / p[u]);
    }
    return std::max(0.0, acc / std::log(base));
}

// |T_Q^n| = n! / prod_u count(u)!
inline BigInt type_class_size(const EmpiricalType& q) {
    BigInt r = 1;
    std::uint64_t placed = 0;
    for (auto c : q.counts()) {
        for (std::uint64_t i = 1; i <= c; ++i) {
            ++placed;
            r *= placed;
            r /= i;
        }
    }
    return r;
}

// log_d P^n(x) for any x of type Q, i.e. sum_u n Q(u) log_d P(u) = -n[H(Q) + D(Q||P)].
// Returns -infinity when Q leaves the support of P.
inline double iid_log_probability(const NoiseDistribution& p, const EmpiricalType& q) {
    if (q.alphabet_size() != p.alphabet_size()) throw std::invalid_argument("type and distribution alphabets differ");
    double acc = 0.0;
    for (std::size_t u = 0; u < q.alphabet_size(); ++u) {
        if (q.count(u) == 0) continue;
        if (p[u] <= 0.0) return -std::numeric_limits<double>::infinity();
        acc += static_cast<double>(q.count(u)) * std::log(p[u]);
    }
    return acc / std::log(static_cast<double>(p.d()));
}

// prod_u count(u)^count(u). For types of equal length, larger key means
// strictly lower entropy, since n H(Q) = n log n - log key. Gives exact
// entropy comparisons and ties.
inline BigInt entropy_key(std::span<const std::uint64_t> counts) {
    BigInt r = 1;
    for (auto c : counts)
        if (c > 1) r *= boost::multiprecision::pow(BigInt(c), static_cast<unsigned>(c));
    return r;
}

inline BigInt entropy_key(const EmpiricalType& q) { return entropy_key(q.counts()); }

}  // namespace stabexp
