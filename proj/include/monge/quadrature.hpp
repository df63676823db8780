// Small numerical helpers shared by the 1D solver and the analytic module.
#pragma once

#include <cmath>
#include <functional>
#include <utility>

namespace monge::quad {

namespace detail {

template <class F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                    int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0; // Richardson
    return simpson_step(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

} // namespace detail

/// Adaptive Simpson with Richardson correction on [a, b], absolute tolerance `tol`.
/// The interval is pre-split into `pieces` panels so narrow features are not missed.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol = 1e-12, int pieces = 16, int max_depth = 50) {
    if (b <= a) return 0.0;
    double total = 0.0;
    const double h = (b - a) / pieces;
    for (int k = 0; k < pieces; ++k) {
        const double lo = a + k * h;
        const double hi = (k + 1 == pieces) ? b : a + (k + 1) * h;
        const double flo = f(lo), fhi = f(hi), fm = f(0.5 * (lo + hi));
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
        total += detail::simpson_step(f, lo, hi, flo, fm, fhi, whole, tol / pieces, max_depth);
    }
    return total;
}

/// Root of a continuous f on [a, b] with a sign change, by bisection to width `xtol`.
template <class F>
double bisect(const F& f, double a, double b, double xtol = 1e-14) {
    double fa = f(a);
    for (int it = 0; it < 200 && (b - a) > xtol * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

} // namespace monge::quad
