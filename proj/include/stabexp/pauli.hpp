#pragma once

// Dense-matrix semantics of generalized Pauli operators at tiny n (d^n <= 32):
// X|j> = |j-1 mod d>, Z|j> = w^j |j>, N_(i,j) = X^i Z^j, N_x the tensor product
// over sites. Used to check stabilizer codes and syndrome recovery end to end.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stabexp/codes.hpp"
#include "stabexp/error.hpp"
#include "stabexp/random.hpp"
#include "stabexp/symplectic.hpp"
#include "stabexp/types.hpp"

namespace stabexp {

using Complex = std::complex<double>;
using UnitaryMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr std::size_t kMaxHilbertDimension = 32;
inline constexpr double kMatrixTolerance = 1e-10;

// N_x N_y = w^{s <x,y>} N_y N_x with s fixed by determine_commutation_sign().
inline constexpr int kCommutationSign = +1;

inline Complex root_of_unity(Residue d, std::int64_t power) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(power) / static_cast<double>(d);
    return std::polar(1.0, angle);
}

inline bool is_unitary(const UnitaryMatrix& u, double tol = kMatrixTolerance) {
    if (u.rows() != u.cols()) return false;
    return (u * u.adjoint() - UnitaryMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

inline std::uint64_t hilbert_dimension(std::size_t n, Residue d) {
    const std::uint64_t dim = checked_pow(d, n);
    if (dim > kMaxHilbertDimension)
        throw instance_too_large("d^n = " + std::to_string(dim) + " exceeds the dense-matrix cap of 32");
    return dim;
}

// X^i Z^j on C^d.
inline UnitaryMatrix pauli_matrix(Residue d, Residue i, Residue j) {
    require_prime(d);
    if (i >= d || j >= d) throw std::invalid_argument("Pauli symbol out of range");
    UnitaryMatrix x = UnitaryMatrix::Zero(d, d), z = UnitaryMatrix::Zero(d, d);
    for (Residue k = 0; k < d; ++k) {
        x((k + d - 1) % d, k) = 1.0;
        z(k, k) = root_of_unity(d, k);
    }
    UnitaryMatrix out = UnitaryMatrix::Identity(d, d);
    for (Residue t = 0; t < i; ++t) out = out * x;
    for (Residue t = 0; t < j; ++t) out = out * z;
    return out;
}

inline UnitaryMatrix kronecker(const UnitaryMatrix& a, const UnitaryMatrix& b) {
    UnitaryMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    return out;
}

// N_{x_1} (x) ... (x) N_{x_n}, site 1 the most significant tensor factor.
inline UnitaryMatrix pauli_tensor(const SymplecticVector& x) {
    hilbert_dimension(x.n(), x.d());
    UnitaryMatrix out = pauli_matrix(x.d(), x.u(0), x.v(0));
    for (std::size_t i = 1; i < x.n(); ++i) out = kronecker(out, pauli_matrix(x.d(), x.u(i), x.v(i)));
    return out;
}

// The c with N_x N_y = w^c N_y N_x, found by matrix comparison.
inline Residue commutation_exponent(const SymplecticVector& x, const SymplecticVector& y) {
    x.check_compatible(y);
    const UnitaryMatrix a = pauli_tensor(x), b = pauli_tensor(y);
    const UnitaryMatrix xy = a * b, yx = b * a;
    for (Residue c = 0; c < x.d(); ++c)
        if ((xy - root_of_unity(x.d(), c) * yx).cwiseAbs().maxCoeff() <= kMatrixTolerance) return c;
    throw invariant_violation("Pauli operators neither commute nor commute up to a root of unity");
}

// Brute force over all single-site pairs at d = 3 (where +1 and -1 differ):
// the sign s with commutation_exponent(x, y) = s <x, y> mod d.
inline int determine_commutation_sign() {
    constexpr Residue d = 3;
    const PrimeField f{d};
    bool plus = true, minus = true;
    for (std::uint64_t a = 0; a < d * d; ++a)
        for (std::uint64_t b = 0; b < d * d; ++b) {
            const auto x = SymplecticVector::from_index(a, 1, d), y = SymplecticVector::from_index(b, 1, d);
            const Residue c = commutation_exponent(x, y), p = pairing(x, y);
            plus = plus && c == p;
            minus = minus && c == f.neg(p);
        }
    if (plus == minus) throw invariant_violation("commutation sign is not determined");
    return plus ? +1 : -1;
}

struct StabilizerCode {
    SymplecticSubspace L;
    std::vector<SymplecticVector> generators;  // the canonical basis of L
    std::vector<UnitaryMatrix> phased_ops;     // generator matrices rescaled to order d
    UnitaryMatrix projector;                   // onto the joint +1 eigenspace

    std::uint64_t code_dimension() const { return checked_pow(L.d(), L.n() - L.dim()); }
};

namespace detail {

inline UnitaryMatrix matrix_power(const UnitaryMatrix& m, std::uint64_t e) {
    UnitaryMatrix out = UnitaryMatrix::Identity(m.rows(), m.cols());
    for (std::uint64_t i = 0; i < e; ++i) out = out * m;
    return out;
}

inline double max_abs(const UnitaryMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace detail

// Code space {psi : M psi = psi for M in the phased stabilizer group}. Each
// N_g satisfies N_g^d = lambda I with |lambda| = 1; multiplying by a d-th
// root of 1/lambda gives an order-d generator. The phased generators commute,
// so w = sum c_i g_i -> prod_i G_i^{c_i} is a homomorphism on L and the
// group average is the code projector.
inline StabilizerCode stabilizer_code(const SymplecticSubspace& L) {
    if (!is_isotropic(L)) throw std::invalid_argument("stabilizer code needs an isotropic subspace");
    const std::size_t n = L.n();
    const Residue d = L.d();
    const auto dim = static_cast<Eigen::Index>(hilbert_dimension(n, d));
    const UnitaryMatrix identity = UnitaryMatrix::Identity(dim, dim);

    StabilizerCode code{L, L.basis(), {}, identity};
    for (const auto& g : code.generators) {
        const UnitaryMatrix m = pauli_tensor(g);
        const UnitaryMatrix md = detail::matrix_power(m, d);
        const Complex lambda = md(0, 0);
        if (detail::max_abs(md - lambda * identity) > kMatrixTolerance)
            throw invariant_violation("N_g^d is not a scalar");
        const UnitaryMatrix phased = std::polar(1.0, -std::arg(lambda) / static_cast<double>(d)) * m;
        if (detail::max_abs(detail::matrix_power(phased, d) - identity) > kMatrixTolerance)
            throw invariant_violation("phased generator does not have order d");
        code.phased_ops.push_back(phased);
    }
    for (std::size_t a = 0; a < code.phased_ops.size(); ++a)
        for (std::size_t b = a + 1; b < code.phased_ops.size(); ++b) {
            const auto& p = code.phased_ops[a];
            const auto& q = code.phased_ops[b];
            if (detail::max_abs(p * q - q * p) > kMatrixTolerance)
                throw invariant_violation("stabilizer generators do not commute");
        }

    // Projector = (1/|L|) sum_w M_w = prod_i (1/d) sum_t G_i^t.
    for (const auto& g : code.phased_ops) {
        UnitaryMatrix avg = UnitaryMatrix::Zero(dim, dim), power = identity;
        for (Residue t = 0; t < d; ++t) {
            avg += power;
            power = power * g;
        }
        code.projector = code.projector * (avg / static_cast<double>(d));
    }

    const UnitaryMatrix& proj = code.projector;
    if (detail::max_abs(proj * proj - proj) > kMatrixTolerance ||
        detail::max_abs(proj - proj.adjoint()) > kMatrixTolerance)
        throw invariant_violation("code projector is not an orthogonal projector");
    if (std::abs(proj.trace() - static_cast<double>(code.code_dimension())) > 1e-8)
        throw invariant_violation("code projector has the wrong trace");
    return code;
}

// Syndrome of x: the eigenvalue exponents c_j of G_j on N_x psi, psi in the code.
inline std::vector<Residue> syndrome(const StabilizerCode& code, const SymplecticVector& x) {
    const PrimeField f{code.L.d()};
    std::vector<Residue> s;
    s.reserve(code.generators.size());
    for (const auto& g : code.generators) {
        const Residue p = pairing(g, x);
        s.push_back(kCommutationSign > 0 ? p : f.neg(p));
    }
    return s;
}

// Orthonormal basis of the code space, one column per basis state.
inline Eigen::MatrixXcd code_basis(const StabilizerCode& code) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(code.projector);
    const auto k = static_cast<Eigen::Index>(code.code_dimension());
    // Eigenvalues ascend; the last k belong to eigenvalue 1.
    return eig.eigenvectors().rightCols(k);
}

template <class URBG>
StateVector random_code_state(const Eigen::MatrixXcd& basis, URBG& rng) {
    StateVector c(basis.cols());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        // Box-Muller from portable uniforms.
        const double u1 = 1.0 - uniform_unit(rng), u2 = uniform_unit(rng);
        const double r = std::sqrt(-2.0 * std::log(u1));
        c(i) = Complex(r * std::cos(2.0 * std::numbers::pi * u2), r * std::sin(2.0 * std::numbers::pi * u2));
    }
    StateVector psi = basis * c;
    return psi / psi.norm();
}

// True when N_x and N_y agree on the code space up to a global phase.
inline bool same_action_on_code(const StabilizerCode& code, const SymplecticVector& x, const SymplecticVector& y) {
    const Eigen::MatrixXcd basis = code_basis(code);
    const Eigen::MatrixXcd a = pauli_tensor(x) * basis, b = pauli_tensor(y) * basis;
    // Overlap matrix of the two images; must be a unit-modulus multiple of I.
    const Eigen::MatrixXcd overlap = a.adjoint() * b;
    const Complex phase = overlap(0, 0);
    if (std::abs(std::abs(phase) - 1.0) > 1e-8) return false;
    return detail::max_abs(b - phase * a) <= 1e-8;
}

struct CorrectabilityReport {
    std::uint64_t members_checked = 0;
    std::uint64_t trials = 0;
    double min_member_overlap = 1.0;    // worst |<psi|R(N_x psi)>|^2 over x in Gamma
    double min_channel_fidelity = 1.0;  // worst <psi|R(A(psi))|psi> over trial states
    double failure_probability = 0.0;
    bool members_corrected = true;
    bool fidelity_bound_holds = true;

    bool ok() const { return members_corrected && fidelity_bound_holds; }
};

// Syndrome-recovery channel R(rho) = sum_s N_{z_s}^dag P_s rho P_s N_{z_s},
// with P_s the syndrome projector and z_s the leader carrying syndrome s.
// Checks (a) every x in Gamma is undone exactly on `trials` random code
// states and (b) channel fidelity >= 1 - failure_probability on the same
// states, both with slack 1e-8.
template <class URBG>
CorrectabilityReport verify_correctability(const StabilizerCode& code, const CorrectableSet& c,
                                           const NoiseDistribution& p, std::uint64_t trials, URBG& rng) {
    if (!(code.L == c.L)) throw std::invalid_argument("code and correctable set come from different subspaces");
    if (p.d() != code.L.d()) throw std::invalid_argument("distribution uses a different d");
    const std::size_t n = code.L.n();
    const Residue d = code.L.d();
    const auto dim = static_cast<Eigen::Index>(hilbert_dimension(n, d));
    const std::size_t m = code.generators.size();
    const std::uint64_t syndromes = checked_pow(d, m);

    auto syndrome_index = [&](const std::vector<Residue>& s) {
        std::uint64_t r = 0;
        for (Residue v : s) r = r * d + v;
        return r;
    };

    // P_s = prod_j (1/d) sum_t w^{-t s_j} G_j^t
    std::vector<UnitaryMatrix> recovery(syndromes);
    std::vector<bool> have(syndromes, false);
    for (const auto& z : c.leaders) {
        const auto s = syndrome(code, z);
        const auto si = syndrome_index(s);
        if (have[si]) throw invariant_violation("two leaders share a syndrome");
        UnitaryMatrix proj = UnitaryMatrix::Identity(dim, dim);
        for (std::size_t j = 0; j < m; ++j) {
            UnitaryMatrix avg = UnitaryMatrix::Zero(dim, dim), power = UnitaryMatrix::Identity(dim, dim);
            for (Residue t = 0; t < d; ++t) {
                avg += root_of_unity(d, -static_cast<std::int64_t>(t) * s[j]) * power;
                power = power * code.phased_ops[j];
            }
            proj = proj * (avg / static_cast<double>(d));
        }
        recovery[si] = pauli_tensor(z).adjoint() * proj;
        have[si] = true;
    }
    for (bool h : have)
        if (!h) throw invariant_violation("a syndrome has no leader");

    const Eigen::MatrixXcd basis = code_basis(code);
    std::vector<StateVector> states;
    for (std::uint64_t t = 0; t < trials; ++t) states.push_back(random_code_state(basis, rng));

    // sum_s |<psi| R_s E psi>|^2
    auto recovered_overlap = [&](const StateVector& psi, const StateVector& corrupted) {
        double acc = 0.0;
        for (const auto& r : recovery) acc += std::norm(psi.dot(r * corrupted));
        return acc;
    };

    CorrectabilityReport rep;
    rep.trials = trials;
    rep.failure_probability = failure_probability(c, p);

    for (auto idx : c.members) {
        const UnitaryMatrix e = pauli_tensor(SymplecticVector::from_index(idx, n, d));
        for (const auto& psi : states) {
            const double f = recovered_overlap(psi, e * psi);
            rep.min_member_overlap = std::min(rep.min_member_overlap, f);
        }
        ++rep.members_checked;
    }
    rep.members_corrected = rep.min_member_overlap >= 1.0 - 1e-8;

    const std::uint64_t total = space_size(n, d);
    std::vector<CompensatedSum> fidelity(states.size());
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        const double weight = detail::product_probability(idx, n, p);
        if (weight == 0.0) continue;
        const UnitaryMatrix e = pauli_tensor(SymplecticVector::from_index(idx, n, d));
        for (std::size_t t = 0; t < states.size(); ++t) fidelity[t] += weight * recovered_overlap(states[t], e * states[t]);
    }
    for (const auto& f : fidelity) rep.min_channel_fidelity = std::min(rep.min_channel_fidelity, f.value());
    rep.fidelity_bound_holds = states.empty() || rep.min_channel_fidelity >= 1.0 - rep.failure_probability - 1e-8;
    return rep;
}

inline CorrectabilityReport verify_correctability(const StabilizerCode& code, const CorrectableSet& c,
                                                  const NoiseDistribution& p, std::uint64_t trials,
                                                  std::uint64_t seed) {
    Engine rng(seed);
    return verify_correctability(code, c, p, trials, rng);
}

}  // namespace stabexp
