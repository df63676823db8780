// Finite-difference checks of candidate transport potentials: the
// Laplace-Ampere-Monge equation, the curl-free and Euler-Lagrange conditions
// on the displacement field, and the p = 2 displacement functional.
//
// Nothing here searches for a potential; candidates are supplied by the caller.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "monge/error.hpp"
#include "monge/grid.hpp"

namespace monge {

/// Scalar samples on a grid. A non-empty `mask` marks valid nodes with 1.
struct ScalarField2D {
    GridLayout layout;
    std::vector<double> values;
    std::vector<std::uint8_t> mask;

    double at(std::size_t ix, std::size_t iy) const { return values[layout.index(ix, iy)]; }
    bool valid(std::size_t k) const { return mask.empty() || mask[k] != 0; }

    std::size_t valid_count() const {
        if (mask.empty()) return values.size();
        return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
    }

    /// Max |value| over valid nodes (0 when none are valid).
    double max_abs() const {
        double m = 0.0;
        for (std::size_t k = 0; k < values.size(); ++k)
            if (valid(k)) m = std::max(m, std::abs(values[k]));
        return m;
    }
};

/// Displacement field w = T - id, two components per node.
struct VectorField2D {
    GridLayout layout;
    std::vector<double> w1;
    std::vector<double> w2;
};

inline ScalarField2D sample_scalar(const GridLayout& layout, const std::function<double(PhasePoint)>& fn) {
    ScalarField2D f{layout, std::vector<double>(layout.size()), {}};
    for (std::size_t k = 0; k < layout.size(); ++k) {
        f.values[k] = fn(layout.node(k));
        if (!std::isfinite(f.values[k])) throw Error(ErrorKind::domain, "scalar field must be finite");
    }
    return f;
}

inline VectorField2D sample_vector(const GridLayout& layout, const std::function<PhasePoint(PhasePoint)>& fn) {
    VectorField2D w{layout, std::vector<double>(layout.size()), std::vector<double>(layout.size())};
    for (std::size_t k = 0; k < layout.size(); ++k) {
        const PhasePoint v = fn(layout.node(k));
        if (!v.finite()) throw Error(ErrorKind::domain, "vector field must be finite");
        w.w1[k] = v.x1;
        w.w2[k] = v.x2;
    }
    return w;
}

/// phi(x) = shift . x, whose gradient is the constant translation `shift`.
inline ScalarField2D translation_potential(const GridLayout& layout, PhasePoint shift) {
    return sample_scalar(layout, [shift](PhasePoint x) { return shift.x1 * x.x1 + shift.x2 * x.x2; });
}

/// Potential of the affine map carrying the vacuum onto the squeezed vacuum
/// Squeezed{s, theta}: T = R(theta) diag(s+1, 1/(s+1)) R(-theta), phi = x.(T - I)x / 2.
/// theta = pi/2 gives phi = -s x1^2 / (2s + 2) + s x2^2 / 2.
inline ScalarField2D squeeze_potential(const GridLayout& layout, double s, double theta) {
    if (!(s >= 0.0)) throw Error(ErrorKind::domain, "squeeze_potential: s must be >= 0");
    const double c = std::cos(theta), sn = std::sin(theta);
    const double l1 = s, l2 = 1.0 / (s + 1.0) - 1.0; // eigenvalues of T - I
    const double a11 = l1 * c * c + l2 * sn * sn;
    const double a22 = l1 * sn * sn + l2 * c * c;
    const double a12 = (l1 - l2) * c * sn;
    return sample_scalar(layout, [=](PhasePoint x) {
        return 0.5 * (a11 * x.x1 * x.x1 + 2.0 * a12 * x.x1 * x.x2 + a22 * x.x2 * x.x2);
    });
}

namespace detail {

inline void require_stencil(const GridLayout& g) {
    if (g.nx < 3 || g.ny < 3) throw Error(ErrorKind::grid, "finite differences need at least a 3 x 3 grid");
}

inline void require_same_layout(const GridLayout& a, const GridLayout& b) {
    if (!(a == b)) throw Error(ErrorKind::grid, "fields must share the same grid");
}

// Derivative along x1 / x2 of row-major samples: central inside, second-order one-sided at the edges.
inline double d1(const std::vector<double>& f, const GridLayout& g, std::size_t ix, std::size_t iy) {
    const double h = g.dx;
    if (ix == 0) return (-3.0 * f[g.index(0, iy)] + 4.0 * f[g.index(1, iy)] - f[g.index(2, iy)]) / (2.0 * h);
    if (ix + 1 == g.nx)
        return (3.0 * f[g.index(ix, iy)] - 4.0 * f[g.index(ix - 1, iy)] + f[g.index(ix - 2, iy)]) / (2.0 * h);
    return (f[g.index(ix + 1, iy)] - f[g.index(ix - 1, iy)]) / (2.0 * h);
}

inline double d2(const std::vector<double>& f, const GridLayout& g, std::size_t ix, std::size_t iy) {
    const double h = g.dx;
    if (iy == 0) return (-3.0 * f[g.index(ix, 0)] + 4.0 * f[g.index(ix, 1)] - f[g.index(ix, 2)]) / (2.0 * h);
    if (iy + 1 == g.ny)
        return (3.0 * f[g.index(ix, iy)] - 4.0 * f[g.index(ix, iy - 1)] + f[g.index(ix, iy - 2)]) / (2.0 * h);
    return (f[g.index(ix, iy + 1)] - f[g.index(ix, iy - 1)]) / (2.0 * h);
}

inline bool interior(const GridLayout& g, std::size_t ix, std::size_t iy) {
    return ix > 0 && iy > 0 && ix + 1 < g.nx && iy + 1 < g.ny;
}

} // namespace detail

enum class Interpolation {
    bilinear,     // of the density itself
    log_bilinear, // of log density; exact in each axis for Gaussian profiles up to O(dx^2)
};

/// Value of a field between nodes; nullopt outside the grid.
inline std::optional<double> interpolate(const HusimiField& q, PhasePoint y, Interpolation mode = Interpolation::bilinear) {
    const GridLayout& g = q.layout;
    const double fx = (y.x1 - g.origin.x1) / g.dx;
    const double fy = (y.x2 - g.origin.x2) / g.dx;
    const double last_x = static_cast<double>(g.nx - 1), last_y = static_cast<double>(g.ny - 1);
    if (!(fx >= 0.0 && fx <= last_x && fy >= 0.0 && fy <= last_y) || g.nx < 2 || g.ny < 2) return std::nullopt;
    const auto ix = std::min(static_cast<std::size_t>(fx), g.nx - 2);
    const auto iy = std::min(static_cast<std::size_t>(fy), g.ny - 2);
    const double tx = fx - static_cast<double>(ix), ty = fy - static_cast<double>(iy);
    double v00 = q.at(ix, iy), v10 = q.at(ix + 1, iy), v01 = q.at(ix, iy + 1), v11 = q.at(ix + 1, iy + 1);
    const auto blend = [&](double a, double b, double c, double d) {
        return (1 - tx) * (1 - ty) * a + tx * (1 - ty) * b + (1 - tx) * ty * c + tx * ty * d;
    };
    if (mode == Interpolation::log_bilinear) {
        if (!(v00 > 0.0 && v10 > 0.0 && v01 > 0.0 && v11 > 0.0)) return 0.0;
        return std::exp(blend(std::log(v00), std::log(v10), std::log(v01), std::log(v11)));
    }
    return blend(v00, v10, v01, v11);
}

inline VectorField2D grad(const ScalarField2D& phi) {
    const GridLayout& g = phi.layout;
    detail::require_stencil(g);
    VectorField2D w{g, std::vector<double>(g.size()), std::vector<double>(g.size())};
    for (std::size_t iy = 0; iy < g.ny; ++iy)
        for (std::size_t ix = 0; ix < g.nx; ++ix) {
            w.w1[g.index(ix, iy)] = detail::d1(phi.values, g, ix, iy);
            w.w2[g.index(ix, iy)] = detail::d2(phi.values, g, ix, iy);
        }
    return w;
}

struct LamOptions {
    double density_floor = 1e-12;
    Interpolation interpolation = Interpolation::log_bilinear;
    bool strict = false; // throw instead of masking displaced points off the grid or below the floor
};

/// Left minus right side of
///   phi_11 + phi_22 + phi_11 phi_22 - phi_12^2 = Q1(x) / Q2(x + grad phi) - 1
/// at interior nodes. Boundary nodes, displaced points off the grid and points
/// where Q2 falls below the density floor are masked out.
inline ScalarField2D lam_residual(const ScalarField2D& phi, const HusimiField& q1, const HusimiField& q2,
                                  LamOptions opts = {}) {
    const GridLayout& g = phi.layout;
    detail::require_stencil(g);
    detail::require_same_layout(g, q1.layout);
    detail::require_same_layout(g, q2.layout);
    ScalarField2D res{g, std::vector<double>(g.size(), 0.0), std::vector<std::uint8_t>(g.size(), 0)};
    const auto& f = phi.values;
    const double h2 = g.dx * g.dx;
    for (std::size_t iy = 1; iy + 1 < g.ny; ++iy)
        for (std::size_t ix = 1; ix + 1 < g.nx; ++ix) {
            const std::size_t k = g.index(ix, iy);
            const double p11 = (f[g.index(ix + 1, iy)] - 2.0 * f[k] + f[g.index(ix - 1, iy)]) / h2;
            const double p22 = (f[g.index(ix, iy + 1)] - 2.0 * f[k] + f[g.index(ix, iy - 1)]) / h2;
            const double p12 = (f[g.index(ix + 1, iy + 1)] - f[g.index(ix + 1, iy - 1)] - f[g.index(ix - 1, iy + 1)] +
                                f[g.index(ix - 1, iy - 1)]) /
                               (4.0 * h2);
            const PhasePoint x = g.node(ix, iy);
            const PhasePoint y{x.x1 + detail::d1(f, g, ix, iy), x.x2 + detail::d2(f, g, ix, iy)};
            const auto q2y = interpolate(q2, y, opts.interpolation);
            if (!q2y) {
                if (opts.strict) throw Error(ErrorKind::grid, "lam_residual: displaced point leaves the grid");
                continue;
            }
            if (*q2y < opts.density_floor) {
                if (opts.strict) throw Error(ErrorKind::domain, "lam_residual: Q2 below the density floor");
                continue;
            }
            const double lhs = p11 + p22 + p11 * p22 - p12 * p12;
            const double rhs = q1.values[k] / *q2y - 1.0;
            res.values[k] = lhs - rhs;
            res.mask[k] = 1;
        }
    return res;
}

/// max |dw1/dx2 - dw2/dx1| over interior nodes.
inline double curl_residual(const VectorField2D& w) {
    const GridLayout& g = w.layout;
    detail::require_stencil(g);
    double m = 0.0;
    for (std::size_t iy = 1; iy + 1 < g.ny; ++iy)
        for (std::size_t ix = 1; ix + 1 < g.nx; ++ix)
            m = std::max(m, std::abs(detail::d2(w.w1, g, ix, iy) - detail::d1(w.w2, g, ix, iy)));
    return m;
}

/// Necessary condition for an optimal field of order p,
///   w1_2 (w1^2 (p-1) + w2^2) - w2_1 (w2^2 (p-1) + w1^2) + (p-2)(w2_2 - w1_1) w1 w2,
/// at interior nodes (boundary masked).
inline ScalarField2D euler_residual(const VectorField2D& w, double p) {
    if (!(p >= 1.0)) throw Error(ErrorKind::domain, "euler_residual: p must be >= 1");
    const GridLayout& g = w.layout;
    detail::require_stencil(g);
    ScalarField2D res{g, std::vector<double>(g.size(), 0.0), std::vector<std::uint8_t>(g.size(), 0)};
    for (std::size_t iy = 1; iy + 1 < g.ny; ++iy)
        for (std::size_t ix = 1; ix + 1 < g.nx; ++ix) {
            const std::size_t k = g.index(ix, iy);
            const double a = w.w1[k], b = w.w2[k];
            const double a1 = detail::d1(w.w1, g, ix, iy), a2 = detail::d2(w.w1, g, ix, iy);
            const double b1 = detail::d1(w.w2, g, ix, iy), b2 = detail::d2(w.w2, g, ix, iy);
            res.values[k] = a2 * (a * a * (p - 1.0) + b * b) - b1 * (b * b * (p - 1.0) + a * a) + (p - 2.0) * (b2 - a1) * a * b;
            res.mask[k] = 1;
        }
    return res;
}

/// sqrt of the trapezoid integral of |grad phi|^2 Q1 (the p = 2 displacement cost).
inline double frechet_displacement(const ScalarField2D& phi, const HusimiField& q1) {
    detail::require_same_layout(phi.layout, q1.layout);
    const VectorField2D w = grad(phi);
    const GridLayout& g = phi.layout;
    double sum = 0.0;
    for (std::size_t iy = 0; iy < g.ny; ++iy)
        for (std::size_t ix = 0; ix < g.nx; ++ix) {
            const std::size_t k = g.index(ix, iy);
            const double wx = (ix == 0 || ix + 1 == g.nx) ? 0.5 : 1.0;
            const double wy = (iy == 0 || iy + 1 == g.ny) ? 0.5 : 1.0;
            sum += wx * wy * (w.w1[k] * w.w1[k] + w.w2[k] * w.w2[k]) * q1.values[k];
        }
    return std::sqrt(sum * g.cell_area());
}

} // namespace monge
