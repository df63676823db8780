// Closed-form Monge distances between coherent, squeezed, thermal and Fock states.
//
// These are the reference values every numeric route in the library is
// checked against.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>

#include "monge/distance.hpp"
#include "monge/error.hpp"
#include "monge/states.hpp"

namespace monge {

/// Complete elliptic integral of the second kind in the parameter convention,
/// E(m) = int_0^{pi/2} sqrt(1 - m sin^2 t) dt, via the arithmetic-geometric mean.
inline double elliptic_e(double m) {
    if (!(m >= 0.0 && m <= 1.0)) throw Error(ErrorKind::domain, "elliptic_e: parameter m must lie in [0, 1]");
    if (m == 1.0) return 1.0;
    double a = 1.0;
    double b = std::sqrt(1.0 - m);
    double c = std::sqrt(m);
    double weight = 0.5; // 2^{n-1}
    double sum = weight * c * c;
    for (int it = 0; it < 64 && std::abs(c) > 1e-17 * a; ++it) {
        const double an = 0.5 * (a + b);
        const double bn = std::sqrt(a * b);
        c = c * c / (4.0 * an); // (a - b) / 2 without cancellation
        a = an;
        b = bn;
        weight *= 2.0;
        sum += weight * c * c;
    }
    const double k = std::numbers::pi / (2.0 * a);
    return k * (1.0 - sum);
}

/// Exact non-negative fraction; used to pin the Fock constants bit-for-bit.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Rational& a, const Rational& b) { return a.num == b.num && a.den == b.den; }
};

/// C_n = (1/2) sum_{k=0}^{n} binom(2k, k) / 4^k in lowest terms; n <= 30.
inline Rational fock_constant_exact(std::uint32_t n) {
    if (n > 30) throw Error(ErrorKind::domain, "fock_constant_exact: n > 30 overflows 64-bit rationals");
    // Common denominator 2 * 4^n; numerator sum_k binom(2k, k) 4^{n-k}.
    std::uint64_t num = 0;
    std::uint64_t central = 1; // binom(2k, k)
    for (std::uint32_t k = 0; k <= n; ++k) {
        if (k > 0)
            central = static_cast<std::uint64_t>(static_cast<unsigned __int128>(central) * (2 * k) * (2 * k - 1) /
                                                  (static_cast<std::uint64_t>(k) * k));
        num += central << (2 * (n - k));
    }
    std::uint64_t den = std::uint64_t{2} << (2 * n);
    const std::uint64_t g = std::gcd(num, den);
    return {num / g, den / g};
}

/// C_n = int_0^inf (1 - F_n(r)) dr / sqrt(pi) for the Fock radial distribution F_n.
inline double fock_constant(std::uint32_t n) {
    if (n <= 30) return fock_constant_exact(n).to_double();
    double term = 1.0; // binom(2k, k) / 4^k
    double sum = 1.0;
    for (std::uint32_t k = 1; k <= n; ++k) {
        term *= (2.0 * k - 1.0) / (2.0 * k);
        sum += term;
    }
    return 0.5 * sum;
}

/// Coherent pair: the Euclidean phase-space distance, for every p.
inline DistanceResult dist_coherent(PhasePoint a, PhasePoint b, PNorm p = PNorm(1.0)) {
    return {distance(a, b), Method::analytic, p, {}};
}

/// Vacuum versus squeezed vacuum of strength s (equally |alpha> versus |gamma, alpha>).
inline DistanceResult dist_vacuum_squeezed(double s, PNorm p) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw Error(ErrorKind::domain, "squeezing strength s must be >= 0");
    double value = 0.0;
    if (p.is_infinite()) {
        value = s; // longest displacement of the affine plan
    } else if (p.value() == 1.0) {
        const double w = s + 1.0;
        value = s / std::sqrt(std::numbers::pi) * elliptic_e(1.0 - 1.0 / (w * w));
    } else if (p.value() == 2.0) {
        const double w = s + 1.0;
        value = std::sqrt(0.5 * s * s * (1.0 + 1.0 / (w * w)));
    } else {
        throw Error(ErrorKind::unsupported, "vacuum-squeezed closed form exists only for p = 1, 2, inf");
    }
    return {value, Method::analytic, p, {}};
}

/// Two thermal states (p = 1); nbar = 0 is the vacuum.
inline DistanceResult dist_thermal(double nbar1, double nbar2) {
    if (!(nbar1 >= 0.0) || !(nbar2 >= 0.0)) throw Error(ErrorKind::domain, "mean photon numbers must be >= 0");
    const double v = std::sqrt(std::numbers::pi) / 2.0 * std::abs(std::sqrt(nbar1 + 1.0) - std::sqrt(nbar2 + 1.0));
    return {v, Method::analytic, PNorm(1.0), {}};
}

/// Two Fock states (p = 1): sqrt(pi) |C_m - C_n|.
inline DistanceResult dist_fock(std::uint32_t m, std::uint32_t n) {
    double gap = 0.0;
    if (m <= 30 && n <= 30) {
        // Difference taken on the exact fractions before rounding.
        const Rational a = fock_constant_exact(std::min(m, n));
        const Rational b = fock_constant_exact(std::max(m, n));
        const std::uint64_t den = std::max(a.den, b.den); // both powers of two
        const std::uint64_t diff = b.num * (den / b.den) - a.num * (den / a.den);
        gap = static_cast<double>(diff) / static_cast<double>(den);
    } else {
        gap = std::abs(fock_constant(m) - fock_constant(n));
    }
    return {std::sqrt(std::numbers::pi) * gap, Method::analytic, PNorm(1.0), {}};
}

/// Closed form for the pair if one is known, otherwise nullopt.
inline std::optional<DistanceResult> closed_form(const StateSpec& a, const StateSpec& b, PNorm p) {
    validate(a);
    validate(b);
    const auto* ca = std::get_if<Coherent>(&a);
    const auto* cb = std::get_if<Coherent>(&b);
    if (ca && cb) return dist_coherent(ca->alpha, cb->alpha, p);

    // Coherent state (or vacuum spelled any way) against a squeezed state about the same centre.
    auto coherent_center = [](const StateSpec& s) -> std::optional<PhasePoint> {
        if (const auto* c = std::get_if<Coherent>(&s)) return c->alpha;
        if (const auto* q = std::get_if<Squeezed>(&s); q && q->s == 0.0) return q->alpha;
        if (is_vacuum(s)) return PhasePoint{};
        return std::nullopt;
    };
    for (int swap = 0; swap < 2; ++swap) {
        const StateSpec& x = swap ? b : a;
        const StateSpec& y = swap ? a : b;
        const auto* q = std::get_if<Squeezed>(&y);
        const auto cx = coherent_center(x);
        if (q && cx && *cx == q->alpha) {
            if (p.is_infinite() || p.value() == 1.0 || p.value() == 2.0) return dist_vacuum_squeezed(q->s, p);
            return std::nullopt;
        }
    }
    // Two unsqueezed coherent states written as squeezed with s = 0.
    if (const auto ra = coherent_center(a), rb = coherent_center(b); ra && rb) return dist_coherent(*ra, *rb, p);

    if (p.is_infinite() || p.value() != 1.0) return std::nullopt;

    auto thermal_nbar = [](const StateSpec& s) -> std::optional<double> {
        if (const auto* t = std::get_if<Thermal>(&s)) return t->nbar;
        if (is_vacuum(s)) return 0.0;
        return std::nullopt;
    };
    if (const auto ta = thermal_nbar(a), tb = thermal_nbar(b); ta && tb) return dist_thermal(*ta, *tb);

    auto fock_n = [](const StateSpec& s) -> std::optional<std::uint32_t> {
        if (const auto* f = std::get_if<Fock>(&s)) return f->n;
        if (is_vacuum(s)) return 0u;
        return std::nullopt;
    };
    if (const auto fa = fock_n(a), fb = fock_n(b); fa && fb) return dist_fock(*fa, *fb);
    return std::nullopt;
}

} // namespace monge
