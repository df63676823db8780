// Husimi Q-functions of the standard quantum-optics states.
//
// Densities follow the 1/pi convention H(alpha) = <alpha|rho|alpha>/pi and
// integrate to one against d^2 alpha = dx1 dx2.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>

#include "monge/error.hpp"

namespace monge {

/// Point alpha = x1 + i x2 of the classical phase plane.
struct PhasePoint {
    double x1 = 0.0;
    double x2 = 0.0;

    double norm() const { return std::hypot(x1, x2); }
    double norm2() const { return x1 * x1 + x2 * x2; }
    bool finite() const { return std::isfinite(x1) && std::isfinite(x2); }

    friend PhasePoint operator+(PhasePoint a, PhasePoint b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
    friend PhasePoint operator-(PhasePoint a, PhasePoint b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
    friend PhasePoint operator*(double k, PhasePoint a) { return {k * a.x1, k * a.x2}; }
    friend bool operator==(PhasePoint, PhasePoint) = default;
};

inline double distance(PhasePoint a, PhasePoint b) { return (a - b).norm(); }

struct Coherent {
    PhasePoint alpha;
    friend bool operator==(const Coherent&, const Coherent&) = default;
};

/// Squeezed state D(alpha) S(gamma)|0>, strength s = e^g - 1, axis angle theta.
struct Squeezed {
    double s = 0.0;
    double theta = 0.0;
    PhasePoint alpha;
    friend bool operator==(const Squeezed&, const Squeezed&) = default;
};

struct Fock {
    std::uint32_t n = 0;
    friend bool operator==(const Fock&, const Fock&) = default;
};

struct Thermal {
    double nbar = 0.0;
    friend bool operator==(const Thermal&, const Thermal&) = default;
};

using StateSpec = std::variant<Coherent, Squeezed, Fock, Thermal>;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

/// Throws ErrorKind::domain when the state violates its invariants.
inline void validate(const StateSpec& state) {
    std::visit(overloaded{
                   [](const Coherent& c) {
                       if (!c.alpha.finite())
                           throw Error(ErrorKind::domain, "coherent amplitude must be finite");
                   },
                   [](const Squeezed& q) {
                       if (!(q.s >= 0.0) || !std::isfinite(q.s))
                           throw Error(ErrorKind::domain, "squeezing strength s must be >= 0");
                       if (!std::isfinite(q.theta) || !q.alpha.finite())
                           throw Error(ErrorKind::domain, "squeezed state parameters must be finite");
                   },
                   [](const Fock&) {},
                   [](const Thermal& t) {
                       if (!(t.nbar >= 0.0) || !std::isfinite(t.nbar))
                           throw Error(ErrorKind::domain, "mean photon number must be >= 0");
                   },
               },
               state);
}

/// Phase-space point the Husimi function is centred on.
inline PhasePoint center(const StateSpec& state) {
    return std::visit(overloaded{
                          [](const Coherent& c) { return c.alpha; },
                          [](const Squeezed& q) { return q.alpha; },
                          [](const auto&) { return PhasePoint{}; },
                      },
                      state);
}

/// Length scale used to size sampling windows (window radius = 6 widths).
inline double effective_width(const StateSpec& state) {
    return std::visit(overloaded{
                          [](const Coherent&) { return 1.0; },
                          [](const Squeezed& q) { return q.s + 1.0; },
                          [](const Fock& f) { return std::sqrt(f.n + 1.0) + 3.0; },
                          [](const Thermal& t) { return std::sqrt(t.nbar + 1.0); },
                      },
                      state);
}

/// True for the vacuum in any of its spellings (coherent 0, fock 0, thermal 0, unsqueezed).
inline bool is_vacuum(const StateSpec& state) {
    return std::visit(overloaded{
                          [](const Coherent& c) { return c.alpha == PhasePoint{}; },
                          [](const Squeezed& q) { return q.s == 0.0 && q.alpha == PhasePoint{}; },
                          [](const Fock& f) { return f.n == 0; },
                          [](const Thermal& t) { return t.nbar == 0.0; },
                      },
                      state);
}

inline bool is_rotationally_symmetric(const StateSpec& state) {
    return std::visit(overloaded{
                          [](const Coherent& c) { return c.alpha == PhasePoint{}; },
                          [](const Squeezed& q) { return q.s == 0.0 && q.alpha == PhasePoint{}; },
                          [](const Fock&) { return true; },
                          [](const Thermal&) { return true; },
                      },
                      state);
}

/// Normalised Husimi density H(alpha) = <alpha|rho|alpha>/pi.
inline double husimi_value(const StateSpec& state, PhasePoint alpha) {
    using std::numbers::pi;
    return std::visit(
        overloaded{
            [&](const Coherent& c) { return std::exp(-(alpha - c.alpha).norm2()) / pi; },
            [&](const Squeezed& q) {
                // Rotate into the squeeze frame about the centre; the long axis is x1 at theta = 0.
                const PhasePoint d = alpha - q.alpha;
                const double c = std::cos(q.theta), s = std::sin(q.theta);
                const double u1 = c * d.x1 + s * d.x2;
                const double u2 = -s * d.x1 + c * d.x2;
                const double w = q.s + 1.0;
                return std::exp(-u1 * u1 / (w * w) - u2 * u2 * (w * w)) / pi;
            },
            [&](const Fock& f) {
                const double r2 = alpha.norm2();
                if (f.n == 0) return std::exp(-r2) / pi;
                if (r2 == 0.0) return 0.0;
                return std::exp(f.n * std::log(r2) - r2 - std::lgamma(f.n + 1.0)) / pi;
            },
            [&](const Thermal& t) {
                const double w = t.nbar + 1.0;
                return std::exp(-alpha.norm2() / w) / (pi * w);
            },
        },
        state);
}

/// Exact distribution function of |alpha| for a rotationally symmetric state.
class RadialCdf {
public:
    /// Gaussian profile F(r) = 1 - exp(-r^2 / width2).
    static RadialCdf gaussian(double width2) { return RadialCdf(width2, 0, false); }
    /// Fock profile F(r) = 1 - Gamma(n+1, r^2)/n!.
    static RadialCdf fock(std::uint32_t n) { return RadialCdf(1.0, n, n > 0); }

    double operator()(double r) const { return r <= 0.0 ? 0.0 : 1.0 - survival(r); }

    /// 1 - F(r), accurate in the tail.
    double survival(double r) const {
        if (r <= 0.0) return 1.0;
        const double x = r * r;
        if (!is_fock_) return std::exp(-x / width2_);
        // Gamma(n+1, x)/n! = e^{-x} sum_{k<=n} x^k/k!, summed in log space so e^{-x} cannot underflow early.
        const double logx = std::log(x);
        double log_term = -x;
        double log_max = log_term;
        for (std::uint32_t k = 1; k <= n_; ++k) {
            log_term += logx - std::log(static_cast<double>(k));
            log_max = std::max(log_max, log_term);
        }
        double sum = 0.0;
        log_term = -x;
        sum += std::exp(log_term - log_max);
        for (std::uint32_t k = 1; k <= n_; ++k) {
            log_term += logx - std::log(static_cast<double>(k));
            sum += std::exp(log_term - log_max);
        }
        return std::min(1.0, sum * std::exp(log_max));
    }

    /// Radial density R(r) = 2 pi r H(r) = dF/dr.
    double density(double r) const {
        if (r <= 0.0) return 0.0;
        const double x = r * r;
        if (!is_fock_) return 2.0 * r * std::exp(-x / width2_) / width2_;
        return 2.0 * r * std::exp(n_ * std::log(x) - x - std::lgamma(n_ + 1.0));
    }

    bool is_fock() const { return is_fock_; }
    std::uint32_t photon_number() const { return n_; }
    double width2() const { return width2_; }

private:
    RadialCdf(double width2, std::uint32_t n, bool fock) : width2_(width2), n_(n), is_fock_(fock) {}

    double width2_;
    std::uint32_t n_;
    bool is_fock_;
};

inline RadialCdf radial_cdf(const StateSpec& state) {
    validate(state);
    if (!is_rotationally_symmetric(state))
        throw Error(ErrorKind::not_rotationally_symmetric,
                    "radial distribution requires a state centred at the origin without squeezing");
    return std::visit(overloaded{
                          [](const Fock& f) { return RadialCdf::fock(f.n); },
                          [](const Thermal& t) { return RadialCdf::gaussian(t.nbar + 1.0); },
                          [](const auto&) { return RadialCdf::gaussian(1.0); },
                      },
                      state);
}

} // namespace monge
