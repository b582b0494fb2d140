#include "stabexp/symplectic.hpp"

#include <map>
#include <set>

#include "gtest/gtest.h"

using namespace stabexp;

namespace {

SymplecticVector vec(std::vector<Residue> c, Residue d) { return SymplecticVector(std::move(c), d); }

SymplecticVector random_vector(std::size_t n, Residue d, Engine& rng) {
    return SymplecticVector::from_index(uniform_below(rng, space_size(n, d)), n, d);
}

// prod_{i=1}^{m} (d^{2n-i+1} - d^{i-1}) / prod_{i=0}^{m-1} (d^m - d^i):
// ordered isotropic bases divided by ordered bases per subspace.
BigInt ordered_basis_oracle(std::size_t n, std::size_t m, Residue d) {
    BigInt ordered = 1, per_space = 1;
    auto pw = [&](std::size_t e) -> BigInt { return boost::multiprecision::pow(BigInt(d), static_cast<unsigned>(e)); };
    for (std::size_t i = 1; i <= m; ++i) ordered *= pw(2 * n - i + 1) - pw(i - 1);
    for (std::size_t i = 0; i < m; ++i) per_space *= pw(m) - pw(i);
    return ordered / per_space;
}

}  // namespace

TEST(symplectic, pairing_examples) {
    EXPECT_EQ(pairing(vec({1, 0}, 2), vec({0, 1}, 2)), 1u);
    EXPECT_EQ(pairing(vec({1, 2, 3, 4}, 5), vec({4, 3, 2, 1}, 5)), 0u);
    EXPECT_EQ(pairing(vec({1, 2, 3, 4}, 5), vec({1, 2, 3, 4}, 5)), 0u);
}

TEST(symplectic, pairing_rejects_mismatch) {
    EXPECT_THROW(pairing(vec({1, 0}, 2), vec({1, 0, 0, 0}, 2)), std::invalid_argument);
    EXPECT_THROW(pairing(vec({1, 0}, 2), vec({1, 0}, 3)), std::invalid_argument);
}

TEST(symplectic, vector_validation) {
    EXPECT_THROW(vec({1, 0}, 4), std::invalid_argument);
    EXPECT_THROW(vec({2, 0}, 2), std::invalid_argument);
    EXPECT_THROW(vec({1, 0, 1}, 2), std::invalid_argument);
    EXPECT_THROW(SymplecticVector::from_index(16, 2 / 2, 2), std::out_of_range);
}

TEST(symplectic, index_order_is_lexicographic) {
    for (std::uint64_t i = 0; i + 1 < space_size(2, 3); ++i) {
        const auto a = SymplecticVector::from_index(i, 2, 3), b = SymplecticVector::from_index(i + 1, 2, 3);
        EXPECT_LT(a, b);
        EXPECT_EQ(a.index(), i);
    }
}

TEST(symplectic, pairing_is_antisymmetric_and_bilinear) {
    Engine rng(7);
    for (Residue d : {2u, 3u, 5u, 7u}) {
        const PrimeField f{d};
        for (int t = 0; t < 200; ++t) {
            const auto x = random_vector(3, d, rng), y = random_vector(3, d, rng), z = random_vector(3, d, rng);
            EXPECT_EQ(pairing(x, x), 0u);
            EXPECT_EQ(pairing(x, y), f.neg(pairing(y, x)));
            const auto a = static_cast<Residue>(uniform_below(rng, d)), b = static_cast<Residue>(uniform_below(rng, d));
            const auto lhs = pairing(a * x + b * y, z);
            EXPECT_EQ(lhs, f.add(f.mul(a, pairing(x, z)), f.mul(b, pairing(y, z))));
        }
    }
}

TEST(symplectic, canonical_form_examples) {
    const auto dup = canonical_form({vec({1, 0, 1, 0}, 2), vec({1, 0, 1, 0}, 2)});
    ASSERT_EQ(dup.dim(), 1u);
    EXPECT_EQ(dup.basis()[0], vec({1, 0, 1, 0}, 2));

    const auto full = canonical_form({vec({0, 1}, 2), vec({1, 1}, 2)});
    ASSERT_EQ(full.dim(), 2u);
    EXPECT_EQ(full.basis()[0], vec({1, 0}, 2));
    EXPECT_EQ(full.basis()[1], vec({0, 1}, 2));

    const auto empty = canonical_form(std::span<const SymplecticVector>{}, 2, 3);
    EXPECT_EQ(empty.dim(), 0u);
    EXPECT_EQ(empty, SymplecticSubspace::zero(2, 3));
}

TEST(symplectic, canonical_form_is_basis_independent) {
    Engine rng(11);
    for (int t = 0; t < 100; ++t) {
        const Residue d = t % 2 ? 3 : 5;
        std::vector<SymplecticVector> gens;
        for (int i = 0; i < 3; ++i) gens.push_back(random_vector(3, d, rng));
        const auto s = canonical_form(gens, 3, d);
        // Same span from mixed generators.
        std::vector<SymplecticVector> mixed = {gens[0] + gens[1], 2 * gens[1], gens[2] + gens[0] + gens[1], gens[2]};
        EXPECT_EQ(canonical_form(mixed, 3, d), s);
        for (const auto& g : gens) EXPECT_TRUE(s.contains(g));
    }
}

TEST(symplectic, dual_examples) {
    EXPECT_EQ(dual(SymplecticSubspace::zero(2, 3)), SymplecticSubspace::full(2, 3));

    // d=2, n=1: check all four vectors against the pairing with (1,0).
    const auto line = canonical_form({vec({1, 0}, 2)});
    std::vector<SymplecticVector> orth;
    for (std::uint64_t i = 0; i < 4; ++i) {
        const auto x = SymplecticVector::from_index(i, 1, 2);
        if (pairing(x, vec({1, 0}, 2)) == 0) orth.push_back(x);
    }
    EXPECT_EQ(dual(line), canonical_form(orth, 1, 2));
    EXPECT_EQ(dual(line), line);
}

TEST(symplectic, duality_properties) {
    Engine rng(3);
    for (Residue d : {2u, 3u}) {
        for (std::size_t n = 1; n <= 3; ++n) {
            for (int t = 0; t < 40; ++t) {
                std::vector<SymplecticVector> gens;
                const auto count = uniform_below(rng, 2 * n + 1);
                for (std::uint64_t i = 0; i < count; ++i) gens.push_back(random_vector(n, d, rng));
                const auto s = canonical_form(gens, n, d);
                const auto perp = dual(s);
                EXPECT_EQ(s.dim() + perp.dim(), 2 * n);
                EXPECT_EQ(dual(perp), s);
                for (const auto& x : perp.basis())
                    for (const auto& y : s.basis()) EXPECT_EQ(pairing(x, y), 0u);
                const bool contained = std::all_of(s.basis().begin(), s.basis().end(),
                                                   [&](const SymplecticVector& b) { return perp.contains(b); });
                EXPECT_EQ(is_isotropic(s), contained);
            }
        }
    }
}

TEST(symplectic, isotropy_examples) {
    EXPECT_TRUE(is_isotropic(SymplecticSubspace::zero(2, 2)));
    EXPECT_TRUE(is_isotropic(canonical_form({vec({1, 2, 0, 1}, 3)})));
    EXPECT_FALSE(is_isotropic(canonical_form({vec({1, 0}, 2), vec({0, 1}, 2)})));
}

TEST(symplectic, isotropic_dual_dimension) {
    for (const auto& L : enumerate_isotropic(3, 2, 2)) EXPECT_EQ(dual(L).dim(), 3u + 1u);
}

TEST(symplectic, enumerate_examples) {
    const auto lines = enumerate_isotropic(2, 1, 2);
    EXPECT_EQ(lines.size(), 15u);
    EXPECT_EQ(enumerate_isotropic(3, 2, 2).size(), 315u);
    const auto zero = enumerate_isotropic(3, 0, 3);
    ASSERT_EQ(zero.size(), 1u);
    EXPECT_EQ(zero[0].dim(), 0u);
}

TEST(symplectic, enumerate_matches_counting_oracle) {
    for (Residue d : {2u, 3u})
        for (std::size_t n = 1; n <= 3; ++n)
            for (std::size_t m = 0; m <= n; ++m) {
                const auto all = enumerate_isotropic(n, m, d);
                EXPECT_EQ(BigInt(all.size()), ordered_basis_oracle(n, m, d)) << "d=" << d << " n=" << n << " m=" << m;
                EXPECT_EQ(isotropic_count(n, m, d), ordered_basis_oracle(n, m, d));
                EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
                EXPECT_TRUE(std::adjacent_find(all.begin(), all.end()) == all.end());
                for (const auto& L : all) {
                    EXPECT_EQ(L.dim(), m);
                    EXPECT_TRUE(is_isotropic(L));
                }
            }
}

TEST(symplectic, enumerate_matches_brute_force_pairs) {
    // Every isotropic plane of F_2^4 from all vector pairs.
    std::set<SymplecticSubspace> planes;
    for (std::uint64_t a = 1; a < 16; ++a)
        for (std::uint64_t b = 1; b < 16; ++b) {
            const auto x = SymplecticVector::from_index(a, 2, 2), y = SymplecticVector::from_index(b, 2, 2);
            if (a == b || pairing(x, y) != 0) continue;
            planes.insert(canonical_form({x, y}));
        }
    const auto all = enumerate_isotropic(2, 2, 2);
    EXPECT_EQ(std::set<SymplecticSubspace>(all.begin(), all.end()), planes);
}

TEST(symplectic, enumerate_guards) {
    Limits tight;
    tight.max_ensemble = 10;
    EXPECT_THROW(enumerate_isotropic(2, 1, 2, tight), instance_too_large);
    Limits small_space;
    small_space.max_space = 100;
    EXPECT_THROW(enumerate_isotropic(4, 1, 2, small_space), instance_too_large);
    EXPECT_THROW(enumerate_isotropic(2, 3, 2), std::invalid_argument);
    EXPECT_THROW(enumerate_isotropic(2, 1, 4), std::invalid_argument);
}

TEST(symplectic, sample_examples) {
    EXPECT_EQ(sample_isotropic(3, 0, 2, 5), SymplecticSubspace::zero(3, 2));
    EXPECT_EQ(sample_isotropic(3, 2, 3, 99), sample_isotropic(3, 2, 3, 99));
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto L = sample_isotropic(3, 3, 2, seed);
        EXPECT_EQ(L.dim(), 3u);
        EXPECT_TRUE(is_isotropic(L));
    }
}

TEST(symplectic, sample_frequencies_within_three_sigma) {
    const auto all = enumerate_isotropic(2, 1, 2);
    std::map<SymplecticSubspace, std::uint64_t> hits;
    Engine rng(2024);
    constexpr std::uint64_t kSamples = 100'000;
    for (std::uint64_t s = 0; s < kSamples; ++s) ++hits[sample_isotropic(2, 1, 2, rng)];
    ASSERT_EQ(hits.size(), all.size());
    const double p = 1.0 / 15.0;
    const double sigma = std::sqrt(kSamples * p * (1 - p));
    for (const auto& L : all) EXPECT_NEAR(static_cast<double>(hits[L]), kSamples * p, 3 * sigma);
}

TEST(symplectic, coset_examples) {
    const auto line = canonical_form({vec({1, 0}, 2)});
    const auto cosets = coset_decomposition(line);
    ASSERT_EQ(cosets.size(), 2u);
    EXPECT_EQ(cosets[0].members, (std::vector<std::uint64_t>{vec({0, 0}, 2).index(), vec({1, 0}, 2).index()}));
    EXPECT_EQ(cosets[1].members, (std::vector<std::uint64_t>{vec({0, 1}, 2).index(), vec({1, 1}, 2).index()}));

    EXPECT_EQ(coset_decomposition(SymplecticSubspace::full(2, 3)).size(), 1u);
}

TEST(symplectic, cosets_partition_the_space) {
    // n = 3, k = 1: d^{n-k} = 4 cosets of L^perp, every vector in exactly one.
    for (const auto& L : enumerate_isotropic(3, 2, 2)) {
        const auto perp = dual(L);
        const auto cosets = coset_decomposition(perp);
        EXPECT_EQ(cosets.size(), 4u);
        std::vector<int> seen(space_size(3, 2), 0);
        for (const auto& c : cosets) {
            EXPECT_EQ(c.members.size(), perp.size());
            const auto rep = SymplecticVector::from_index(c.members.front(), 3, 2);
            for (auto idx : c.members) {
                ++seen[idx];
                EXPECT_TRUE(perp.contains(SymplecticVector::from_index(idx, 3, 2) - rep));
            }
        }
        EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
    }
}
