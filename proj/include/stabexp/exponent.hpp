#pragma once

// The error exponent E(R, P) of the Pauli-mixture channel, by three routes:
//
//   primal     min_Q [ D(Q||P) + |1 - H(Q) - R|^+ ]                 (slow oracle)
//   gallager   max_{0<=delta<=1} delta(1-R) - (1+delta) log_d sum_u P(u)^{1/(1+delta)}
//   piecewise  straight line below R1, D(P_delta* || P) on [R1, R0), zero above R0
//
// Rates are in base-d units. R0 = 1 - H(P) is the hashing bound.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stabexp/error.hpp"
#include "stabexp/numeric.hpp"
#include "stabexp/types.hpp"

namespace stabexp {

// E values at or below this are reported as the zero regime.
inline constexpr double kZeroExponent = 1e-10;
inline constexpr double kDeltaTolerance = 1e-10;

enum class Regime { line, curved, zero };

constexpr std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::line: return "line";
        case Regime::curved: return "curved";
        case Regime::zero: return "zero";
    }
    return "?";
}

struct ExponentPoint {
    double rate;
    double exponent;
    Regime regime;
    double delta_star;
};

struct Thresholds {
    double R0;
    double R1;
    double hashing_bound;
};

// P(identity) = 1 - (d^2 - 1) eps, every other symbol eps.
inline NoiseDistribution depolarizing(Residue d, double epsilon) {
    require_prime(d);
    const double others = static_cast<double>(d) * d - 1.0;
    if (!(epsilon >= 0.0) || epsilon > 1.0 / others)
        throw std::invalid_argument("depolarizing epsilon must lie in [0, 1/(d^2-1)]");
    std::vector<double> p(static_cast<std::size_t>(d) * d, epsilon);
    p[0] = 1.0 - others * epsilon;
    return {d, std::move(p)};
}

namespace detail {

inline double log_d(double x, Residue d) { return std::log(x) / std::log(static_cast<double>(d)); }

// log_d sum_u P(u)^s over the support of P.
inline double log_power_sum(const NoiseDistribution& p, double s) {
    CompensatedSum acc;
    for (double x : p.probs())
        if (x > 0.0) acc += std::pow(x, s);
    return log_d(acc.value(), p.d());
}

// Golden-section search for the maximum of a concave function on [lo, hi].
// Endpoints are compared explicitly so boundary maxima come back exactly.
inline std::pair<double, double> maximize_concave(const std::function<double(double)>& f, double lo, double hi,
                                                  double tol) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invphi * (b - a), e = a + invphi * (b - a);
    double fc = f(c), fe = f(e);
    while (b - a > tol) {
        if (fc >= fe) {
            b = e;
            e = c;
            fe = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + invphi * (b - a);
            fe = f(e);
        }
    }
    std::pair<double, double> best{0.5 * (a + b), f(0.5 * (a + b))};
    for (double x : {lo, hi}) {
        const double fx = f(x);
        if (fx >= best.second) best = {x, fx};
    }
    return best;
}

inline Regime classify(double rate, double exponent, const Thresholds& t) {
    if (exponent <= kZeroExponent) return Regime::zero;
    return rate < t.R1 ? Regime::line : Regime::curved;
}

inline void require_rate(double rate) {
    if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("rate must lie in [0, 1)");
}

}  // namespace detail

// P_delta(u) = P(u)^{1/(1+delta)} / sum_v P(v)^{1/(1+delta)}; zeros stay zero.
inline NoiseDistribution tilted(const NoiseDistribution& p, double delta) {
    if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0, 1]");
    if (delta == 0.0) return p;
    const double s = 1.0 / (1.0 + delta);
    std::vector<double> q(p.alphabet_size(), 0.0);
    CompensatedSum z;
    for (std::size_t u = 0; u < q.size(); ++u) {
        if (p[u] > 0.0) q[u] = std::pow(p[u], s);
        z += q[u];
    }
    for (auto& x : q) x /= z.value();
    // Renormalise so the sum check holds to rounding.
    CompensatedSum total;
    for (double x : q) total += x;
    for (auto& x : q) x /= total.value();
    return {p.d(), std::move(q)};
}

// R_delta = 1 - H(P_delta), non-increasing in delta.
inline double tilted_rate(const NoiseDistribution& p, double delta) {
    return 1.0 - entropy(tilted(p, delta).probs(), static_cast<double>(p.d()));
}

inline Thresholds thresholds(const NoiseDistribution& p) {
    const double r0 = 1.0 - entropy(p.probs(), static_cast<double>(p.d()));
    return {r0, tilted_rate(p, 1.0), r0};
}

// delta(1-R) - (1+delta) log_d sum_u P(u)^{1/(1+delta)}; exactly 0 at delta = 0.
inline double gallager_objective(double rate, const NoiseDistribution& p, double delta) {
    if (delta == 0.0) return 0.0;
    return delta * (1.0 - rate) - (1.0 + delta) * detail::log_power_sum(p, 1.0 / (1.0 + delta));
}

inline ExponentPoint exponent_gallager(double rate, const NoiseDistribution& p) {
    detail::require_rate(rate);
    const auto [delta, value] = detail::maximize_concave(
        [&](double delta) { return gallager_objective(rate, p, delta); }, 0.0, 1.0, kDeltaTolerance);
    const double e = std::max(0.0, value);
    return {rate, e, detail::classify(rate, e, thresholds(p)), delta};
}

inline ExponentPoint exponent_piecewise(double rate, const NoiseDistribution& p) {
    detail::require_rate(rate);
    const Thresholds t = thresholds(p);
    if (rate >= t.R0) return {rate, 0.0, Regime::zero, 0.0};
    if (rate < t.R1) {
        const double e = 1.0 - rate - 2.0 * detail::log_power_sum(p, 0.5);
        return {rate, e, detail::classify(rate, e, t), 1.0};
    }

    // Bisection relies on R_delta being non-increasing; check it on a grid first.
    constexpr int kProbe = 32;
    double prev = t.R0;
    for (int i = 1; i <= kProbe; ++i) {
        const double r = tilted_rate(p, static_cast<double>(i) / kProbe);
        if (r > prev + 1e-12) throw invariant_violation("R_delta is not monotone in delta");
        prev = r;
    }

    double lo = 0.0, hi = 1.0;  // R_lo > rate >= R_hi
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (tilted_rate(p, mid) > rate)
            lo = mid;
        else
            hi = mid;
    }
    const double delta = 0.5 * (lo + hi);
    const double d = static_cast<double>(p.d());
    const double e = divergence(tilted(p, delta).probs(), p.probs(), d);
    return {rate, e, detail::classify(rate, e, t), delta};
}

// Grid search over the probability simplex, then local zoom refinement.
//
// The objective is convex in Q and invariant under permutations of symbols
// with equal P, so averaging a minimiser over such permutations does not
// increase it. The search therefore runs over masses w_j per class of equal
// P value, spread evenly inside each class. Classes with P = 0 get no mass
// (D would be infinite).
inline double exponent_primal(double rate, const NoiseDistribution& p, double resolution = 0.005,
                              std::uint64_t max_points = 20'000'000) {
    detail::require_rate(rate);
    if (!(resolution > 0.0 && resolution <= 0.1)) throw std::invalid_argument("primal grid resolution must lie in (0, 0.1]");

    std::map<double, std::size_t> class_sizes;
    for (double x : p.probs())
        if (x > 0.0) ++class_sizes[x];
    std::vector<double> pv, sz;
    for (auto [value, size] : class_sizes) {
        pv.push_back(value);
        sz.push_back(static_cast<double>(size));
    }
    const std::size_t m = pv.size();
    const double ln_d = std::log(static_cast<double>(p.d()));

    auto objective = [&](const std::vector<double>& w) {
        double dv = 0.0, h = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (w[j] <= 0.0) continue;
            dv += w[j] * std::log(w[j] / (sz[j] * pv[j]));
            h -= w[j] * std::log(w[j] / sz[j]);
        }
        dv = std::max(0.0, dv / ln_d);
        h /= ln_d;
        return dv + std::max(0.0, 1.0 - h - rate);
    };

    if (m == 1) return objective({1.0});

    const auto steps = static_cast<std::uint64_t>(std::ceil(1.0 / resolution - 1e-9));
    if (composition_count(steps, m) > max_points)
        throw instance_too_large("primal grid with " + std::to_string(m) + " free classes is too large");

    std::vector<double> best_w(m, 0.0), w(m, 0.0);
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::uint64_t> c(m, 0);
    auto coarse = [&](auto&& self, std::size_t pos, std::uint64_t left) -> void {
        if (pos + 1 == m) {
            c[pos] = left;
            for (std::size_t j = 0; j < m; ++j) w[j] = static_cast<double>(c[j]) / static_cast<double>(steps);
            const double f = objective(w);
            if (f < best) {
                best = f;
                best_w = w;
            }
            return;
        }
        for (std::uint64_t k = 0; k <= left; ++k) {
            c[pos] = k;
            self(self, pos + 1, left - k);
        }
    };
    coarse(coarse, 0, steps);

    // Zoom: scan offsets {-2h, ..., 2h} in steps of h/2 on the first m-1
    // coordinates (the last absorbs the remainder), recentre, and halve h
    // once the centre stops moving.
    constexpr int kHalfWidth = 4;
    const std::size_t free_dims = m - 1;
    std::uint64_t cells = 1;
    for (std::size_t j = 0; j < free_dims; ++j) cells *= 2 * kHalfWidth + 1;
    double h = 1.0 / static_cast<double>(steps);
    std::vector<int> offs(free_dims);
    while (h > 1e-10) {
        bool moved = false;
        const std::vector<double> centre = best_w;
        for (std::uint64_t cell = 0; cell < cells; ++cell) {
            std::uint64_t r = cell;
            for (std::size_t j = 0; j < free_dims; ++j) {
                offs[j] = static_cast<int>(r % (2 * kHalfWidth + 1)) - kHalfWidth;
                r /= 2 * kHalfWidth + 1;
            }
            double rest = 1.0;
            bool inside = true;
            for (std::size_t j = 0; j < free_dims; ++j) {
                w[j] = centre[j] + offs[j] * (h / 2.0);
                if (w[j] < 0.0) {
                    if (w[j] < -1e-15) inside = false;
                    w[j] = 0.0;
                }
                rest -= w[j];
            }
            if (!inside || rest < -1e-15) continue;
            w[free_dims] = std::max(0.0, rest);
            const double f = objective(w);
            if (f < best) {
                best = f;
                best_w = w;
                moved = true;
            }
        }
        if (!moved) h /= 2.0;
    }
    return best;
}

// (n+1)^{2(d^2-1)} d^{-n E(k/n, P)}
inline double theorem_bound_rhs(std::uint64_t n, std::uint64_t k, const NoiseDistribution& p) {
    if (n == 0 || k > n) throw std::invalid_argument("theorem bound needs n >= 1 and 0 <= k <= n");
    const double d = static_cast<double>(p.d());
    const double rate = static_cast<double>(k) / static_cast<double>(n);
    const double e = rate < 1.0 ? exponent_piecewise(rate, p).exponent : 0.0;
    const double log_rhs = 2.0 * (d * d - 1.0) * std::log(static_cast<double>(n) + 1.0) -
                           static_cast<double>(n) * e * std::log(d);
    return std::exp(log_rhs);
}

// Lower bound 1 - (n+1)^{2(d^2-1)} d^{-n E(k/n, P)} on the best fidelity.
// Negative (vacuous) values are returned unchanged.
inline double theorem_fidelity_bound(std::uint64_t n, std::uint64_t k, const NoiseDistribution& p) {
    return 1.0 - theorem_bound_rhs(n, k, p);
}

struct ClassicalComparison {
    double classical;  // E_r(R + 1, uniform, W)
    double quantum;    // E(R, P)
};

// Random-coding exponent of the additive classical channel W(v|u) = P(v - u)
// on F_d^2 with uniform input, through Gallager's E0 computed from the full
// transition matrix, at rate R + 1.
inline ClassicalComparison classical_gallager_check(double rate, const NoiseDistribution& p) {
    detail::require_rate(rate);
    const Residue d = p.d();
    const PrimeField f{d};
    const std::size_t s = p.alphabet_size();
    std::vector<std::vector<double>> w(s, std::vector<double>(s));
    for (Residue ui = 0; ui < d; ++ui)
        for (Residue uj = 0; uj < d; ++uj)
            for (Residue vi = 0; vi < d; ++vi)
                for (Residue vj = 0; vj < d; ++vj)
                    w[ui * d + uj][vi * d + vj] = p.at(f.sub(vi, ui), f.sub(vj, uj));
    const double input = 1.0 / static_cast<double>(s);

    auto e0 = [&](double rho) {
        CompensatedSum outer;
        for (std::size_t v = 0; v < s; ++v) {
            CompensatedSum inner;
            for (std::size_t u = 0; u < s; ++u)
                if (w[u][v] > 0.0) inner += input * std::pow(w[u][v], 1.0 / (1.0 + rho));
            outer += std::pow(inner.value(), 1.0 + rho);
        }
        return -detail::log_d(outer.value(), d);
    };
    const double shifted = rate + 1.0;
    const auto [rho, value] =
        detail::maximize_concave([&](double r) { return e0(r) - r * shifted; }, 0.0, 1.0, kDeltaTolerance);
    return {value, exponent_piecewise(rate, p).exponent};
}

}  // namespace stabexp
