#pragma once

// Exact linear algebra on F_d^{2n} with the symplectic pairing.
//
// Vectors use the interleaved layout (u_1, v_1, ..., u_n, v_n), where (u_i, v_i)
// indexes the single-site operator X^{u_i} Z^{v_i}. Every vector also has an
// integer index: the coordinates read as a base-d numeral with u_1 most
// significant, so index order equals lexicographic order.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "stabexp/error.hpp"
#include "stabexp/field.hpp"
#include "stabexp/random.hpp"

namespace stabexp {

using BigInt = boost::multiprecision::cpp_int;

// Guardrails for exhaustive work.
struct Limits {
    std::uint64_t max_ensemble = 1'000'000;        // isotropic subspaces enumerated
    std::uint64_t max_space = std::uint64_t{1} << 24;  // d^{2n}
};

class SymplecticVector {
public:
    // Zero vector of F_d^{2n}.
    SymplecticVector(std::size_t n, Residue d) : coords_(2 * n, 0), d_(d) {
        if (n == 0) throw std::invalid_argument("symplectic vector needs n >= 1");
        require_prime(d);
    }

    SymplecticVector(std::vector<Residue> coords, Residue d) : coords_(std::move(coords)), d_(d) {
        require_prime(d);
        if (coords_.empty() || coords_.size() % 2 != 0)
            throw std::invalid_argument("symplectic vector length must be a positive even number");
        for (Residue c : coords_)
            if (c >= d) throw std::invalid_argument("coordinate out of range for F_" + std::to_string(d));
    }

    static SymplecticVector from_index(std::uint64_t index, std::size_t n, Residue d) {
        SymplecticVector x(n, d);
        for (std::size_t i = 2 * n; i-- > 0;) {
            x.coords_[i] = static_cast<Residue>(index % d);
            index /= d;
        }
        if (index != 0) throw std::out_of_range("vector index exceeds d^{2n}");
        return x;
    }

    std::uint64_t index() const {
        std::uint64_t r = 0;
        for (Residue c : coords_) r = r * d_ + c;
        return r;
    }

    std::size_t n() const { return coords_.size() / 2; }
    Residue d() const { return d_; }
    std::size_t size() const { return coords_.size(); }
    std::span<const Residue> coords() const { return coords_; }
    Residue operator[](std::size_t i) const { return coords_[i]; }
    Residue u(std::size_t site) const { return coords_[2 * site]; }
    Residue v(std::size_t site) const { return coords_[2 * site + 1]; }
    // Site symbol (u, v) flattened to u*d + v, the alphabet order of X = F_d^2.
    std::size_t symbol(std::size_t site) const { return static_cast<std::size_t>(u(site)) * d_ + v(site); }

    bool is_zero() const {
        return std::all_of(coords_.begin(), coords_.end(), [](Residue c) { return c == 0; });
    }

    SymplecticVector& add_scaled(const SymplecticVector& other, Residue a) {
        check_compatible(other);
        const PrimeField f{d_};
        for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] = f.add(coords_[i], f.mul(a, other.coords_[i]));
        return *this;
    }

    friend SymplecticVector operator+(SymplecticVector a, const SymplecticVector& b) { return a.add_scaled(b, 1); }
    friend SymplecticVector operator-(SymplecticVector a, const SymplecticVector& b) {
        return a.add_scaled(b, a.d_ - 1);
    }
    friend SymplecticVector operator*(Residue a, SymplecticVector x) {
        const PrimeField f{x.d_};
        for (auto& c : x.coords_) c = f.mul(a % x.d_, c);
        return x;
    }

    friend bool operator==(const SymplecticVector&, const SymplecticVector&) = default;
    friend auto operator<=>(const SymplecticVector& a, const SymplecticVector& b) {
        if (auto c = a.d_ <=> b.d_; c != 0) return c;
        return a.coords_ <=> b.coords_;
    }

    void check_compatible(const SymplecticVector& other) const {
        if (other.d_ != d_ || other.coords_.size() != coords_.size())
            throw std::invalid_argument("symplectic vectors differ in n or d");
    }

private:
    std::vector<Residue> coords_;
    Residue d_;
};

// <x, y> = sum_i u_i v'_i - v_i u'_i  (mod d)
inline Residue pairing(const SymplecticVector& x, const SymplecticVector& y) {
    x.check_compatible(y);
    const PrimeField f{x.d()};
    Residue acc = 0;
    for (std::size_t i = 0; i < x.n(); ++i) {
        acc = f.add(acc, f.mul(x.u(i), y.v(i)));
        acc = f.sub(acc, f.mul(x.v(i), y.u(i)));
    }
    return acc;
}

namespace detail {

using Row = std::vector<Residue>;

struct Echelon {
    std::vector<Row> rows;
    std::vector<std::size_t> pivots;
};

// Reduced row echelon form over F_d; zero rows are dropped.
inline Echelon row_reduce(std::vector<Row> m, std::size_t cols, Residue d) {
    const PrimeField f{d};
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
        std::size_t p = r;
        while (p < m.size() && m[p][c] == 0) ++p;
        if (p == m.size()) continue;
        std::swap(m[r], m[p]);
        const Residue s = f.inv(m[r][c]);
        for (auto& e : m[r]) e = f.mul(e, s);
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == r || m[i][c] == 0) continue;
            const Residue a = m[i][c];
            for (std::size_t j = c; j < cols; ++j) m[i][j] = f.sub(m[i][j], f.mul(a, m[r][j]));
        }
        pivots.push_back(c);
        ++r;
    }
    m.resize(r);
    return {std::move(m), std::move(pivots)};
}

}  // namespace detail

class SymplecticSubspace;
SymplecticSubspace canonical_form(std::span<const SymplecticVector> basis, std::size_t n, Residue d);

// A linear subspace of F_d^{2n}, always held in reduced row echelon form with
// pivots leftmost, so two subspaces are equal iff their bases are equal.
class SymplecticSubspace {
public:
    static SymplecticSubspace zero(std::size_t n, Residue d) { return canonical_form({}, n, d); }
    static SymplecticSubspace full(std::size_t n, Residue d) {
        std::vector<SymplecticVector> e;
        for (std::size_t i = 0; i < 2 * n; ++i) {
            std::vector<Residue> c(2 * n, 0);
            c[i] = 1;
            e.emplace_back(std::move(c), d);
        }
        return canonical_form(e, n, d);
    }

    std::size_t n() const { return n_; }
    Residue d() const { return d_; }
    std::size_t dim() const { return basis_.size(); }
    const std::vector<SymplecticVector>& basis() const { return basis_; }
    const std::vector<std::size_t>& pivots() const { return pivots_; }
    std::uint64_t size() const { return checked_pow(d_, dim()); }

    // Canonical representative of x + (this subspace): zero in every pivot column.
    SymplecticVector reduce(SymplecticVector x) const {
        check(x);
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            const Residue c = x[pivots_[i]];
            if (c != 0) x.add_scaled(basis_[i], d_ - c);
        }
        return x;
    }

    bool contains(const SymplecticVector& x) const { return reduce(x).is_zero(); }

    // sum_i coeffs[i] * basis[i]
    SymplecticVector combination(std::span<const Residue> coeffs) const {
        SymplecticVector x(n_, d_);
        for (std::size_t i = 0; i < basis_.size(); ++i)
            if (coeffs[i] % d_ != 0) x.add_scaled(basis_[i], coeffs[i] % d_);
        return x;
    }

    // All d^dim elements, ordered by coefficient tuple (first basis row most significant).
    std::vector<SymplecticVector> elements() const {
        const std::uint64_t count = size();
        std::vector<SymplecticVector> out;
        out.reserve(count);
        std::vector<Residue> coeffs(dim(), 0);
        for (std::uint64_t t = 0; t < count; ++t) {
            std::uint64_t r = t;
            for (std::size_t i = dim(); i-- > 0;) {
                coeffs[i] = static_cast<Residue>(r % d_);
                r /= d_;
            }
            out.push_back(combination(coeffs));
        }
        return out;
    }

    friend bool operator==(const SymplecticSubspace& a, const SymplecticSubspace& b) {
        return a.n_ == b.n_ && a.d_ == b.d_ && a.basis_ == b.basis_;
    }
    friend auto operator<=>(const SymplecticSubspace& a, const SymplecticSubspace& b) {
        if (auto c = a.d_ <=> b.d_; c != 0) return c;
        if (auto c = a.n_ <=> b.n_; c != 0) return c;
        if (auto c = a.basis_.size() <=> b.basis_.size(); c != 0) return c;
        return a.basis_ <=> b.basis_;
    }

    void check(const SymplecticVector& x) const {
        if (x.n() != n_ || x.d() != d_) throw std::invalid_argument("vector does not belong to this space");
    }

private:
    friend SymplecticSubspace canonical_form(std::span<const SymplecticVector>, std::size_t, Residue);
    SymplecticSubspace(std::size_t n, Residue d) : n_(n), d_(d) {}

    std::size_t n_;
    Residue d_;
    std::vector<SymplecticVector> basis_;
    std::vector<std::size_t> pivots_;
};

// Row-reduced span of the given vectors; dependent rows are discarded.
inline SymplecticSubspace canonical_form(std::span<const SymplecticVector> basis, std::size_t n, Residue d) {
    require_prime(d);
    if (n == 0) throw std::invalid_argument("n must be positive");
    std::vector<detail::Row> rows;
    rows.reserve(basis.size());
    for (const auto& b : basis) {
        if (b.n() != n || b.d() != d) throw std::invalid_argument("basis vector does not match (n, d)");
        rows.emplace_back(b.coords().begin(), b.coords().end());
    }
    auto ech = detail::row_reduce(std::move(rows), 2 * n, d);
    SymplecticSubspace s(n, d);
    for (auto& r : ech.rows) s.basis_.emplace_back(std::move(r), d);
    s.pivots_ = std::move(ech.pivots);
    return s;
}

inline SymplecticSubspace canonical_form(std::initializer_list<SymplecticVector> basis) {
    if (basis.size() == 0) throw std::invalid_argument("use the (span, n, d) overload for empty input");
    const auto& first = *basis.begin();
    return canonical_form(std::span<const SymplecticVector>(basis.begin(), basis.size()), first.n(), first.d());
}

// L^perp with respect to the symplectic pairing.
inline SymplecticSubspace dual(const SymplecticSubspace& sub) {
    const std::size_t n = sub.n();
    const Residue d = sub.d();
    const PrimeField f{d};
    // <x, y> is the linear functional with coefficient v'_i on u_i and -u'_i on v_i.
    std::vector<detail::Row> constraints;
    for (const auto& y : sub.basis()) {
        detail::Row c(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            c[2 * i] = y.v(i);
            c[2 * i + 1] = f.neg(y.u(i));
        }
        constraints.push_back(std::move(c));
    }
    const auto ech = detail::row_reduce(std::move(constraints), 2 * n, d);
    std::vector<bool> is_pivot(2 * n, false);
    for (auto p : ech.pivots) is_pivot[p] = true;

    std::vector<SymplecticVector> null_basis;
    for (std::size_t free = 0; free < 2 * n; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Residue> x(2 * n, 0);
        x[free] = 1;
        for (std::size_t i = 0; i < ech.rows.size(); ++i) x[ech.pivots[i]] = f.neg(ech.rows[i][free]);
        null_basis.emplace_back(std::move(x), d);
    }
    return canonical_form(null_basis, n, d);
}

inline bool is_isotropic(const SymplecticSubspace& sub) {
    const auto& b = sub.basis();
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = i + 1; j < b.size(); ++j)
            if (pairing(b[i], b[j]) != 0) return false;
    return true;
}

// Number of isotropic m-dimensional subspaces of F_d^{2n}:
// prod_{i=0}^{m-1} (d^{2(n-i)} - 1) / (d^{i+1} - 1).
inline BigInt isotropic_count(std::size_t n, std::size_t m, Residue d) {
    if (m > n) return 0;
    BigInt num = 1, den = 1;
    for (std::size_t i = 0; i < m; ++i) {
        num *= boost::multiprecision::pow(BigInt(d), static_cast<unsigned>(2 * (n - i))) - 1;
        den *= boost::multiprecision::pow(BigInt(d), static_cast<unsigned>(i + 1)) - 1;
    }
    return num / den;
}

inline std::uint64_t space_size(std::size_t n, Residue d) { return checked_pow(d, 2 * n); }

inline void require_space_within(std::size_t n, Residue d, const Limits& limits) {
    const BigInt size = boost::multiprecision::pow(BigInt(d), static_cast<unsigned>(2 * n));
    if (size > limits.max_space)
        throw instance_too_large("d^{2n} = " + size.str() + " exceeds cap " + std::to_string(limits.max_space));
}

inline void require_ensemble_within(std::size_t n, std::size_t m, Residue d, const Limits& limits) {
    const BigInt count = isotropic_count(n, m, d);
    if (count > limits.max_ensemble)
        throw instance_too_large("ensemble size " + count.str() + " exceeds cap " +
                                 std::to_string(limits.max_ensemble));
}

// Every isotropic m-dimensional subspace of F_d^{2n}, each once, sorted.
inline std::vector<SymplecticSubspace> enumerate_isotropic(std::size_t n, std::size_t m, Residue d,
                                                           const Limits& limits = {}) {
    require_prime(d);
    if (n == 0) throw std::invalid_argument("n must be positive");
    if (m > n) throw std::invalid_argument("isotropic subspaces have dimension at most n");
    require_space_within(n, d, limits);
    for (std::size_t i = 1; i <= m; ++i) require_ensemble_within(n, i, d, limits);

    std::set<SymplecticSubspace> level{SymplecticSubspace::zero(n, d)};
    for (std::size_t i = 1; i <= m; ++i) {
        std::set<SymplecticSubspace> next;
        for (const auto& s : level) {
            const auto perp = dual(s);
            std::vector<SymplecticVector> gens = s.basis();
            gens.push_back(SymplecticVector(n, d));
            for (const auto& v : perp.elements()) {
                // One extension vector per line of perp/s: reduced mod s, leading coefficient 1.
                if (!(s.reduce(v) == v) || v.is_zero()) continue;
                const auto lead = std::find_if(v.coords().begin(), v.coords().end(), [](Residue c) { return c != 0; });
                if (*lead != 1) continue;
                gens.back() = v;
                next.insert(canonical_form(gens, n, d));
            }
        }
        level = std::move(next);
    }
    return {level.begin(), level.end()};
}

// Uniform draw from the isotropic m-dimensional subspaces. Grows an ordered
// basis one vector at a time, each uniform on span^perp minus span; the number
// of choices at each step depends only on the step, so every subspace is
// equally likely.
template <class URBG>
SymplecticSubspace sample_isotropic(std::size_t n, std::size_t m, Residue d, URBG& rng) {
    require_prime(d);
    if (n == 0) throw std::invalid_argument("n must be positive");
    if (m > n) throw std::invalid_argument("isotropic subspaces have dimension at most n");
    auto s = SymplecticSubspace::zero(n, d);
    std::vector<Residue> coeffs;
    for (std::size_t i = 0; i < m; ++i) {
        const auto perp = dual(s);
        coeffs.assign(perp.dim(), 0);
        for (;;) {
            for (auto& c : coeffs) c = static_cast<Residue>(uniform_below(rng, d));
            auto v = perp.combination(coeffs);
            if (s.contains(v)) continue;
            std::vector<SymplecticVector> gens = s.basis();
            gens.push_back(std::move(v));
            s = canonical_form(gens, n, d);
            break;
        }
    }
    return s;
}

inline SymplecticSubspace sample_isotropic(std::size_t n, std::size_t m, Residue d, std::uint64_t seed) {
    Engine rng(seed);
    return sample_isotropic(n, m, d, rng);
}

// A coset x + S, listed by member index in increasing order.
struct Coset {
    std::vector<std::uint64_t> members;
};

// Partition of F_d^{2n} into cosets of `sub`, ordered by least member.
inline std::vector<Coset> coset_decomposition(const SymplecticSubspace& sub, const Limits& limits = {}) {
    require_space_within(sub.n(), sub.d(), limits);
    const std::uint64_t total = space_size(sub.n(), sub.d());
    const std::uint64_t count = total / sub.size();
    std::vector<Coset> cosets;
    cosets.reserve(count);
    std::map<std::uint64_t, std::size_t> slot;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        const auto key = sub.reduce(SymplecticVector::from_index(idx, sub.n(), sub.d())).index();
        auto [it, fresh] = slot.try_emplace(key, cosets.size());
        if (fresh) cosets.emplace_back();
        cosets[it->second].members.push_back(idx);
    }
    if (cosets.size() != count) throw invariant_violation("coset count differs from d^{2n - dim}");
    return cosets;
}

}  // namespace stabexp
