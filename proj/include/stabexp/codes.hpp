#pragma once

// Random symplectic codes with minimum-entropy coset leaders, at desk scale.
//
// For an isotropic L of dimension n-k, every coset of L^perp contributes the
// member of least type entropy (ties: least index, i.e. lexicographic). The
// correctable set is Gamma(L) = {z + w : z a leader, w in L}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stabexp/error.hpp"
#include "stabexp/exponent.hpp"
#include "stabexp/numeric.hpp"
#include "stabexp/random.hpp"
#include "stabexp/symplectic.hpp"
#include "stabexp/types.hpp"

namespace stabexp {

// Entropy rank of every vector of F_d^{2n}: rank 0 holds the lowest type
// entropy, and equal ranks mean exactly equal entropy.
class EntropyRanks {
public:
    EntropyRanks(std::size_t n, Residue d, const Limits& limits = {}) : n_(n), d_(d) {
        require_space_within(n, d, limits);
        const std::uint64_t total = space_size(n, d);
        std::map<std::vector<std::uint64_t>, std::size_t> type_slot;
        std::vector<std::size_t> slot_of(total);
        std::vector<BigInt> keys;
        for (std::uint64_t idx = 0; idx < total; ++idx) {
            const auto q = type_of(SymplecticVector::from_index(idx, n, d));
            std::vector<std::uint64_t> c(q.counts().begin(), q.counts().end());
            auto [it, fresh] = type_slot.try_emplace(std::move(c), keys.size());
            if (fresh) keys.push_back(entropy_key(q));
            slot_of[idx] = it->second;
        }
        std::vector<BigInt> distinct = keys;
        std::sort(distinct.begin(), distinct.end(), std::greater<>());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        std::vector<std::uint32_t> slot_rank(keys.size());
        for (std::size_t s = 0; s < keys.size(); ++s)
            slot_rank[s] = static_cast<std::uint32_t>(
                std::lower_bound(distinct.begin(), distinct.end(), keys[s], std::greater<>()) - distinct.begin());
        rank_.resize(total);
        at_most_.assign(distinct.size(), 0);
        for (std::uint64_t idx = 0; idx < total; ++idx) {
            rank_[idx] = slot_rank[slot_of[idx]];
            ++at_most_[rank_[idx]];
        }
        for (std::size_t r = 1; r < at_most_.size(); ++r) at_most_[r] += at_most_[r - 1];
    }

    std::size_t n() const { return n_; }
    Residue d() const { return d_; }
    std::uint32_t operator[](std::uint64_t index) const { return rank_[index]; }
    // Number of vectors y with H(P_y) <= H(P_x) for rank r = rank of x.
    std::uint64_t count_at_most(std::uint32_t r) const { return at_most_[r]; }

private:
    std::size_t n_;
    Residue d_;
    std::vector<std::uint32_t> rank_;
    std::vector<std::uint64_t> at_most_;
};

struct CorrectableSet {
    SymplecticSubspace L;
    SymplecticSubspace L_perp;
    std::vector<SymplecticVector> leaders;  // one per coset of L^perp, cosets ordered by least member
    std::vector<std::uint64_t> members;     // Gamma(L) by index, ascending

    bool contains_index(std::uint64_t index) const {
        return std::binary_search(members.begin(), members.end(), index);
    }
    bool contains(const SymplecticVector& x) const { return contains_index(x.index()); }

    // Leader of the L^perp-coset containing x.
    const SymplecticVector& leader_for(const SymplecticVector& x) const {
        const auto key = L_perp.reduce(x);
        for (const auto& z : leaders)
            if (L_perp.reduce(z) == key) return z;
        throw invariant_violation("no leader for the coset of x");
    }
};

namespace detail {

inline void require_code_subspace(const SymplecticSubspace& L) {
    if (!is_isotropic(L)) throw std::invalid_argument("L is not isotropic");
    if (L.dim() > L.n()) throw std::invalid_argument("isotropic L has dim at most n");
}

// prod_i P(x_i) for the vector with the given index.
inline double product_probability(std::uint64_t index, std::size_t n, const NoiseDistribution& p) {
    const Residue d = p.d();
    const std::uint64_t s = static_cast<std::uint64_t>(d) * d;
    double prob = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        prob *= p[static_cast<std::size_t>(index % s)];
        index /= s;
    }
    return prob;
}

}  // namespace detail

inline CorrectableSet correctable_set(const SymplecticSubspace& L, const EntropyRanks& ranks,
                                      const Limits& limits = {}) {
    detail::require_code_subspace(L);
    if (ranks.n() != L.n() || ranks.d() != L.d()) throw std::invalid_argument("entropy ranks built for another space");
    const std::size_t n = L.n();
    const Residue d = L.d();

    CorrectableSet c{L, dual(L), {}, {}};
    const auto cosets = coset_decomposition(c.L_perp, limits);
    const auto shifts = L.elements();
    c.leaders.reserve(cosets.size());
    c.members.reserve(cosets.size() * shifts.size());
    for (const auto& coset : cosets) {
        std::uint64_t best = coset.members.front();
        for (auto idx : coset.members)
            if (ranks[idx] < ranks[best]) best = idx;
        auto z = SymplecticVector::from_index(best, n, d);
        const auto coset_key = c.L_perp.reduce(z);
        for (const auto& w : shifts) {
            const auto y = z + w;
            // Difference condition, structurally: within one L^perp coset all of
            // Gamma lies in a single L coset, so y - x never lands in L^perp \ L.
            if (!(c.L_perp.reduce(y) == coset_key) || !L.contains(y - z))
                throw invariant_violation("Gamma(L) leaves the leader's coset structure");
            c.members.push_back(y.index());
        }
        c.leaders.push_back(std::move(z));
    }
    std::sort(c.members.begin(), c.members.end());
    if (std::adjacent_find(c.members.begin(), c.members.end()) != c.members.end())
        throw invariant_violation("Gamma(L) has repeated members");
    if (c.members.size() != checked_pow(d, 2 * L.dim()))
        throw invariant_violation("Gamma(L) has the wrong size");
    return c;
}

inline CorrectableSet correctable_set(const SymplecticSubspace& L, const Limits& limits = {}) {
    return correctable_set(L, EntropyRanks(L.n(), L.d(), limits), limits);
}

// Pairwise check that y - x is never in L^perp \ L for x, y in Gamma(L).
inline bool satisfies_difference_condition(const CorrectableSet& c, std::uint64_t max_pairs = 100'000'000) {
    const auto m = c.members.size();
    if (static_cast<double>(m) * static_cast<double>(m) > static_cast<double>(max_pairs))
        throw instance_too_large("pairwise difference check is too large");
    std::vector<SymplecticVector> xs;
    xs.reserve(m);
    for (auto idx : c.members) xs.push_back(SymplecticVector::from_index(idx, c.L.n(), c.L.d()));
    for (const auto& x : xs)
        for (const auto& y : xs) {
            const auto diff = y - x;
            if (c.L_perp.contains(diff) && !c.L.contains(diff)) return false;
        }
    return true;
}

// sum over x not in Gamma(L) of prod_i P(x_i), in ascending index order.
inline double failure_probability(const CorrectableSet& c, const NoiseDistribution& p) {
    if (p.d() != c.L.d()) throw std::invalid_argument("distribution and code use different d");
    const std::size_t n = c.L.n();
    const std::uint64_t total = space_size(n, p.d());
    CompensatedSum acc;
    auto it = c.members.begin();
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        if (it != c.members.end() && *it == idx) {
            ++it;
            continue;
        }
        acc += detail::product_probability(idx, n, p);
    }
    return std::clamp(acc.value(), 0.0, 1.0);
}

// Type-sum form of the averaged failure bound:
//   sum_Q |T_Q| prod_a P(a)^{nQ(a)} min{ sum_{Q': H(Q') <= H(Q)} |T_Q'| d^{-(n-k)}, 1 }.
inline double intermediate_bound(std::uint64_t n, std::uint64_t k, const NoiseDistribution& p) {
    if (n == 0 || k > n) throw std::invalid_argument("need n >= 1 and 0 <= k <= n");
    const auto types = enumerate_types(n, p.alphabet_size());
    std::vector<BigInt> keys, sizes;
    keys.reserve(types.size());
    sizes.reserve(types.size());
    for (const auto& q : types) {
        keys.push_back(entropy_key(q));
        sizes.push_back(type_class_size(q));
    }
    // Cumulative class size over all types with entropy <= H(Q), ties included.
    std::map<BigInt, BigInt, std::greater<>> by_key;
    for (std::size_t i = 0; i < types.size(); ++i) by_key[keys[i]] += sizes[i];
    BigInt running = 0;
    for (auto& [key, size] : by_key) {
        running += size;
        size = running;
    }
    const BigInt scale = boost::multiprecision::pow(BigInt(p.d()), static_cast<unsigned>(n - k));
    const double ln_d = std::log(static_cast<double>(p.d()));

    CompensatedSum acc;
    for (std::size_t i = 0; i < types.size(); ++i) {
        const double log_prob = iid_log_probability(p, types[i]);
        if (std::isinf(log_prob)) continue;
        const BigInt& below = by_key.at(keys[i]);
        const double inner = below >= scale ? 1.0 : below.convert_to<double>() / scale.convert_to<double>();
        acc += sizes[i].convert_to<double>() * std::exp(log_prob * ln_d) * inner;
    }
    return acc.value();
}

enum class EnsembleMode { exhaustive, sampled };

constexpr std::string_view to_string(EnsembleMode m) { return m == EnsembleMode::exhaustive ? "exhaustive" : "sampled"; }

struct EnsembleReport {
    std::uint64_t n;
    std::uint64_t k;
    Residue d;
    NoiseDistribution P;
    double avg_failure;
    double std_error;  // 0 in exhaustive mode
    double intermediate_bound;
    double theorem_bound_rhs;
    EnsembleMode mode;
    std::uint64_t sample_count;  // members averaged over
    std::uint64_t seed;
    std::string ensemble_size;  // |A|, exact

    // avg_failure <= intermediate_bound <= theorem_bound_rhs within tol.
    bool chain_holds(double tol = 1e-12) const {
        return avg_failure <= intermediate_bound + tol && intermediate_bound <= theorem_bound_rhs + tol;
    }
};

// Average of failure_probability over the uniform ensemble of isotropic
// (n-k)-dimensional subspaces: every member (exhaustive) or `samples` uniform
// draws from an engine seeded with `seed` (sampled).
inline EnsembleReport ensemble_average_failure(std::uint64_t n, std::uint64_t k, const NoiseDistribution& p,
                                               EnsembleMode mode, std::uint64_t samples = 0, std::uint64_t seed = 0,
                                               const Limits& limits = {}) {
    if (n == 0 || k > n) throw std::invalid_argument("need n >= 1 and 0 <= k <= n");
    const Residue d = p.d();
    const std::size_t m = n - k;
    const EntropyRanks ranks(n, d, limits);

    EnsembleReport r{n, k, d, p, 0.0, 0.0, 0.0, 0.0, mode, 0, seed, isotropic_count(n, m, d).str()};
    if (mode == EnsembleMode::exhaustive) {
        const auto ensemble = enumerate_isotropic(n, m, d, limits);
        CompensatedSum acc;
        for (const auto& L : ensemble) acc += failure_probability(correctable_set(L, ranks, limits), p);
        r.avg_failure = acc.value() / static_cast<double>(ensemble.size());
        r.sample_count = ensemble.size();
    } else {
        if (samples == 0) throw std::invalid_argument("sampled mode needs at least one sample");
        Engine rng(seed);
        double mean = 0.0, m2 = 0.0;
        for (std::uint64_t s = 1; s <= samples; ++s) {
            const double f = failure_probability(correctable_set(sample_isotropic(n, m, d, rng), ranks, limits), p);
            const double delta = f - mean;
            mean += delta / static_cast<double>(s);
            m2 += delta * (f - mean);
        }
        r.avg_failure = mean;
        r.std_error = samples > 1 ? std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples)) : 0.0;
        r.sample_count = samples;
    }
    r.intermediate_bound = intermediate_bound(n, k, p);
    r.theorem_bound_rhs = theorem_bound_rhs(n, k, p);
    return r;
}

// Exact ratio count / total.
struct CountRatio {
    std::uint64_t count;
    std::uint64_t total;

    double value() const { return static_cast<double>(count) / static_cast<double>(total); }
    // count / total <= d^{-e}
    bool at_most_inverse_power(Residue d, std::uint64_t e) const {
        return BigInt(count) * boost::multiprecision::pow(BigInt(d), static_cast<unsigned>(e)) <= BigInt(total);
    }
    // Cross-multiplied equality, so 6/15 == 2/5.
    friend bool operator==(const CountRatio& a, const CountRatio& b) {
        return BigInt(a.count) * b.total == BigInt(b.count) * a.total;
    }
};

// |A(x)| / |A| with A(x) = {L in A : x in L^perp \ L}.
inline CountRatio counting_ratio(const SymplecticVector& x, std::span<const SymplecticSubspace> ensemble) {
    std::uint64_t hits = 0;
    for (const auto& L : ensemble) {
        L.check(x);
        const bool in_perp = std::all_of(L.basis().begin(), L.basis().end(),
                                         [&](const SymplecticVector& g) { return pairing(x, g) == 0; });
        if (in_perp && !L.contains(x)) ++hits;
    }
    return {hits, ensemble.size()};
}

inline CountRatio counting_ratio(const SymplecticVector& x, std::uint64_t n, std::uint64_t k,
                                 const Limits& limits = {}) {
    if (x.n() != n || k > n) throw std::invalid_argument("x must lie in F_d^{2n} and k <= n");
    const auto ensemble = enumerate_isotropic(n, n - k, x.d(), limits);
    return counting_ratio(x, ensemble);
}

// |A(x)| for every x at once, indexed by vector index.
inline std::vector<std::uint64_t> counting_counts(std::span<const SymplecticSubspace> ensemble, std::size_t n,
                                                  Residue d, const Limits& limits = {}) {
    require_space_within(n, d, limits);
    std::vector<std::uint64_t> counts(space_size(n, d), 0);
    for (const auto& L : ensemble)
        for (const auto& x : dual(L).elements())
            if (!L.contains(x)) ++counts[x.index()];
    return counts;
}

// |B(x)| for every x, with B(x) = {L in A : x not in Gamma(L)}.
inline std::vector<std::uint64_t> exclusion_counts(std::span<const SymplecticSubspace> ensemble, std::size_t n,
                                                   Residue d, const Limits& limits = {}) {
    const EntropyRanks ranks(n, d, limits);
    std::vector<std::uint64_t> counts(space_size(n, d), 0);
    for (const auto& L : ensemble) {
        const auto c = correctable_set(L, ranks, limits);
        auto it = c.members.begin();
        for (std::uint64_t idx = 0; idx < counts.size(); ++idx) {
            if (it != c.members.end() && *it == idx)
                ++it;
            else
                ++counts[idx];
        }
    }
    return counts;
}

// |B(x)| / |A|
inline CountRatio exclusion_ratio(const SymplecticVector& x, std::uint64_t n, std::uint64_t k,
                                  const Limits& limits = {}) {
    if (x.n() != n || k > n) throw std::invalid_argument("x must lie in F_d^{2n} and k <= n");
    const auto ensemble = enumerate_isotropic(n, n - k, x.d(), limits);
    const EntropyRanks ranks(n, x.d(), limits);
    std::uint64_t hits = 0;
    for (const auto& L : ensemble)
        if (!correctable_set(L, ranks, limits).contains(x)) ++hits;
    return {hits, ensemble.size()};
}

// min{ #{y != x : H(P_y) <= H(P_x)} d^{-(n-k)}, 1 }
inline double exclusion_bound(const SymplecticVector& x, std::uint64_t k, const EntropyRanks& ranks) {
    const std::uint64_t others = ranks.count_at_most(ranks[x.index()]) - 1;
    const double scale = static_cast<double>(checked_pow(x.d(), x.n() - k));
    return std::min(1.0, static_cast<double>(others) / scale);
}

}  // namespace stabexp
