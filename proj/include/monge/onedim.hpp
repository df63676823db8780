// Exact one-dimensional Monge solver: area between distribution functions,
// the quantile integral for general p, and the monotone map T = F2^{-1} o F1.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "monge/distance.hpp"
#include "monge/error.hpp"
#include "monge/quadrature.hpp"
#include "monge/states.hpp"

namespace monge {

/// Monotone distribution function on the real line: either closed-form
/// callables or a piecewise-linear interpolant through sorted knots.
class Cdf1D {
public:
    using Fn = std::function<double(double)>;

    /// `survival` is 1 - cdf evaluated without cancellation; `density` is dF/dx.
    /// [lo, hi] is the support and may be infinite.
    static Cdf1D closed_form(Fn cdf, Fn survival, Fn density, double lo, double hi) {
        if (!(lo < hi)) throw Error(ErrorKind::domain, "Cdf1D: support must be a non-empty interval");
        Cdf1D c;
        c.cdf_ = std::move(cdf);
        c.survival_ = std::move(survival);
        c.density_ = std::move(density);
        c.lo_ = lo;
        c.hi_ = hi;
        return c;
    }

    static Cdf1D radial(RadialCdf r) {
        return closed_form([r](double x) { return r(x); }, [r](double x) { return r.survival(x); },
                           [r](double x) { return r.density(x); }, 0.0, std::numeric_limits<double>::infinity());
    }

    /// Knots must be strictly increasing, values nondecreasing from 0 to 1 (within 1e-9);
    /// the terminal value is snapped to exactly 1.
    static Cdf1D piecewise_linear(std::vector<double> xs, std::vector<double> fs) {
        if (xs.size() != fs.size() || xs.size() < 2)
            throw Error(ErrorKind::domain, "Cdf1D: need at least two knots with matching values");
        for (std::size_t k = 1; k < xs.size(); ++k) {
            if (!(xs[k] > xs[k - 1])) throw Error(ErrorKind::domain, "Cdf1D: knots must be strictly increasing");
            if (fs[k] < fs[k - 1]) throw Error(ErrorKind::domain, "Cdf1D: values must be nondecreasing");
        }
        if (std::abs(fs.front()) > 1e-9 || std::abs(fs.back() - 1.0) > 1e-9)
            throw Error(ErrorKind::domain, "Cdf1D: values must run from 0 to 1");
        fs.front() = 0.0;
        fs.back() = 1.0;
        Cdf1D c;
        c.lo_ = xs.front();
        c.hi_ = xs.back();
        c.xs_ = std::move(xs);
        c.fs_ = std::move(fs);
        return c;
    }

    bool is_piecewise_linear() const { return !xs_.empty(); }
    std::span<const double> knots() const { return xs_; }
    double lower() const { return lo_; }
    double upper() const { return hi_; }

    double operator()(double x) const {
        if (x <= lo_) return 0.0;
        if (x >= hi_) return 1.0;
        if (!is_piecewise_linear()) return std::clamp(cdf_(x), 0.0, 1.0);
        const auto k = segment(x);
        const double t = (x - xs_[k]) / (xs_[k + 1] - xs_[k]);
        return fs_[k] + t * (fs_[k + 1] - fs_[k]);
    }

    double survival(double x) const {
        if (x <= lo_) return 1.0;
        if (x >= hi_) return 0.0;
        if (!is_piecewise_linear()) return std::clamp(survival_(x), 0.0, 1.0);
        return 1.0 - (*this)(x);
    }

    double density(double x) const {
        if (x < lo_ || x > hi_) return 0.0;
        if (!is_piecewise_linear()) return density_(x);
        const auto k = segment(std::min(x, std::nextafter(hi_, lo_)));
        return (fs_[k + 1] - fs_[k]) / (xs_[k + 1] - xs_[k]);
    }

    /// Generalised inverse inf{x : F(x) >= t} for t in (0, 1).
    double quantile(double t) const {
        if (!(t > 0.0 && t < 1.0)) throw Error(ErrorKind::domain, "quantile level must lie in (0, 1)");
        if (is_piecewise_linear()) {
            const auto it = std::lower_bound(fs_.begin(), fs_.end(), t);
            const auto k = static_cast<std::size_t>(it - fs_.begin());
            if (k == 0) return xs_.front();
            const double df = fs_[k] - fs_[k - 1];
            return xs_[k - 1] + (t - fs_[k - 1]) / df * (xs_[k] - xs_[k - 1]);
        }
        if (t > 0.5) return upper_quantile(1.0 - t);
        auto [a, b] = bracket([&](double x) { return (*this)(x) >= t; });
        return bisect_predicate(a, b, [&](double x) { return (*this)(x) >= t; });
    }

    /// x with survival(x) = q, for q in (0, 1); resolves the far right tail.
    double upper_quantile(double q) const {
        if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::domain, "tail level must lie in (0, 1)");
        if (is_piecewise_linear()) return quantile(1.0 - q);
        auto [a, b] = bracket([&](double x) { return survival_(x) <= q; });
        return bisect_predicate(a, b, [&](double x) { return survival(x) <= q; });
    }

    /// Finite interval outside which both tails carry less than `tail` probability.
    std::pair<double, double> effective_support(double tail = 1e-13) const {
        double a = lo_, b = hi_;
        if (!std::isfinite(a)) {
            a = std::isfinite(b) ? std::min(b, 0.0) - 1.0 : -1.0;
            while ((*this)(a) > tail) a = 2.0 * a - 1.0;
        }
        if (!std::isfinite(b)) {
            b = std::isfinite(lo_) ? std::max(lo_, 0.0) + 1.0 : 1.0;
            while (survival(b) > tail) b = 2.0 * b + 1.0;
            // Tighten the doubling overshoot.
            b = bisect_predicate(std::max(a, b / 2.0 - 1.0), b, [&](double x) { return survival(x) <= tail; });
        }
        return {a, b};
    }

private:
    Cdf1D() = default;

    std::size_t segment(double x) const {
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        const auto k = static_cast<std::size_t>(it - xs_.begin());
        return std::min(k == 0 ? 0 : k - 1, xs_.size() - 2);
    }

    // Interval [a, b] with pred(a) false and pred(b) true for a monotone predicate.
    template <class Pred>
    std::pair<double, double> bracket(Pred pred) const {
        double a = std::isfinite(lo_) ? lo_ : -1.0;
        double b = std::isfinite(hi_) ? hi_ : 1.0;
        if (!std::isfinite(lo_))
            while (pred(a)) a = 2.0 * a - 1.0;
        if (!std::isfinite(hi_))
            while (!pred(b)) b = 2.0 * b + 1.0;
        return {a, b};
    }

    template <class Pred>
    static double bisect_predicate(double a, double b, Pred pred) {
        for (int it = 0; it < 200; ++it) {
            if (b - a <= 1e-12 * std::max(1.0, std::abs(a) + std::abs(b)) * 0.5) break;
            const double m = 0.5 * (a + b);
            if (pred(m))
                b = m;
            else
                a = m;
        }
        return 0.5 * (a + b);
    }

    Fn cdf_, survival_, density_;
    double lo_ = 0.0, hi_ = 0.0;
    std::vector<double> xs_, fs_;
};

/// Trapezoid-accumulated CDF of a sampled density, renormalised to end at 1.
inline Cdf1D cdf_from_samples(std::span<const double> xs, std::span<const double> density) {
    if (xs.size() != density.size() || xs.size() < 2)
        throw Error(ErrorKind::domain, "cdf_from_samples: need at least two samples of matching length");
    std::vector<double> fs(xs.size(), 0.0);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (!(density[k] >= 0.0) || !std::isfinite(density[k]))
            throw Error(ErrorKind::domain, "cdf_from_samples: density must be finite and >= 0");
        if (k > 0) {
            if (!(xs[k] > xs[k - 1])) throw Error(ErrorKind::domain, "cdf_from_samples: xs must be strictly increasing");
            fs[k] = fs[k - 1] + 0.5 * (density[k - 1] + density[k]) * (xs[k] - xs[k - 1]);
        }
    }
    const double total = fs.back();
    if (!(total > 0.0)) throw Error(ErrorKind::domain, "cdf_from_samples: zero total mass");
    for (double& f : fs) f /= total;
    fs.back() = 1.0;
    return Cdf1D::piecewise_linear(std::vector<double>(xs.begin(), xs.end()), std::move(fs));
}

namespace detail {

inline std::pair<double, double> joint_support(const Cdf1D& f1, const Cdf1D& f2, double tail) {
    const auto [a1, b1] = f1.effective_support(tail);
    const auto [a2, b2] = f2.effective_support(tail);
    return {std::min(a1, a2), std::max(b1, b2)};
}

} // namespace detail

/// p = 1 distance as the area between the two distribution functions.
inline double salvemini(const Cdf1D& f1, const Cdf1D& f2) {
    const auto [lo, hi] = detail::joint_support(f1, f2, 1e-13);
    const auto g = [&](double x) { return f1(x) - f2(x); };

    // Breakpoints: a uniform scan, every knot, and each sign change of F1 - F2.
    std::vector<double> pts;
    constexpr int scan = 1024;
    for (int k = 0; k <= scan; ++k) pts.push_back(lo + (hi - lo) * k / scan);
    for (const Cdf1D* f : {&f1, &f2})
        for (double x : f->knots())
            if (x > lo && x < hi) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::vector<double> breaks;
    breaks.reserve(pts.size() * 2);
    double g_prev = g(pts.front());
    breaks.push_back(pts.front());
    for (std::size_t k = 1; k < pts.size(); ++k) {
        const double g_cur = g(pts[k]);
        if ((g_prev < 0.0 && g_cur > 0.0) || (g_prev > 0.0 && g_cur < 0.0))
            breaks.push_back(quad::bisect(g, pts[k - 1], pts[k]));
        breaks.push_back(pts[k]);
        g_prev = g_cur;
    }

    const double tol = 1e-12;
    const auto abs_g = [&](double x) { return std::abs(g(x)); };
    double area = 0.0;
    for (std::size_t k = 1; k < breaks.size(); ++k) {
        const double a = breaks[k - 1], b = breaks[k];
        if (b <= a) continue;
        area += quad::adaptive_simpson(abs_g, a, b, tol * (b - a) / (hi - lo), 1, 40);
    }
    return area;
}

/// D_{M_p} from the quantile integral (int_0^1 |F1^{-1}(t) - F2^{-1}(t)|^p dt)^{1/p}, p >= 1.
inline double salvemini_p(const Cdf1D& f1, const Cdf1D& f2, double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorKind::domain, "salvemini_p: p must be a finite value >= 1");
    constexpr double cut = 1e-12; // probability left out at each end
    const auto h = [&](double t) { return std::pow(std::abs(f1.quantile(t) - f2.quantile(t)), p); };
    // Both ends are integrable singularities of the quantile; the middle is smooth.
    const double integral = quad::adaptive_simpson(h, cut, 1e-3, 1e-12, 4, 60) +
                            quad::adaptive_simpson(h, 1e-3, 1.0 - 1e-3, 1e-11, 64, 40) +
                            quad::adaptive_simpson(h, 1.0 - 1e-3, 1.0 - cut, 1e-12, 4, 60);
    return std::pow(integral, 1.0 / p);
}

/// Monotone 1D Monge map T(x) = F2^{-1}(F1(x)).
inline double monge_map_1d(const Cdf1D& f1, const Cdf1D& f2, double x) {
    const double t = f1(x);
    if (!(t > 0.0 && t < 1.0)) throw Error(ErrorKind::domain, "monge_map_1d: x lies outside the support of F1");
    if (t <= 0.5) return f2.quantile(t);
    return f2.upper_quantile(f1.survival(x));
}

/// D_{M_p} between rotationally symmetric states through their radial distributions.
inline DistanceResult monge_radial(const StateSpec& a, const StateSpec& b, PNorm p = PNorm(1.0)) {
    if (p.is_infinite() || p.value() < 1.0)
        throw Error(ErrorKind::unsupported, "radial reduction supports finite p >= 1");
    const Cdf1D f1 = Cdf1D::radial(radial_cdf(a));
    const Cdf1D f2 = Cdf1D::radial(radial_cdf(b));
    const double v = p.value() == 1.0 ? salvemini(f1, f2) : salvemini_p(f1, f2, p.value());
    DistanceResult r{v, Method::salvemini, p, {}};
    const auto [lo, hi] = detail::joint_support(f1, f2, 1e-13);
    r.diagnostics["r_max"] = hi;
    return r;
}

} // namespace monge
