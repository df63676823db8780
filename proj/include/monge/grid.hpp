// Rectangular phase-space grids and sampled Husimi fields.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monge/error.hpp"
#include "monge/states.hpp"

namespace monge {

/// Uniform square-cell lattice. Node (ix, iy) sits at origin + (ix, iy) * dx and
/// is the centre of a dx-by-dx cell. Storage is row-major with x1 fastest.
struct GridLayout {
    PhasePoint origin;
    double dx = 0.0;
    std::size_t nx = 0;
    std::size_t ny = 0;

    std::size_t size() const { return nx * ny; }
    std::size_t index(std::size_t ix, std::size_t iy) const { return iy * nx + ix; }
    PhasePoint node(std::size_t ix, std::size_t iy) const {
        return {origin.x1 + static_cast<double>(ix) * dx, origin.x2 + static_cast<double>(iy) * dx};
    }
    PhasePoint node(std::size_t k) const { return node(k % nx, k / nx); }
    double cell_area() const { return dx * dx; }

    /// Smallest lattice of spacing dx whose cells tile [lo, hi] in both axes.
    static GridLayout covering(PhasePoint lo, PhasePoint hi, double dx) {
        if (!(dx > 0.0) || !std::isfinite(dx)) throw Error(ErrorKind::grid, "grid step must be positive");
        if (!(hi.x1 > lo.x1) || !(hi.x2 > lo.x2)) throw Error(ErrorKind::grid, "empty grid window");
        auto cells = [dx](double w) { return static_cast<std::size_t>(std::ceil(w / dx - 1e-9)); };
        const std::size_t nx = std::max<std::size_t>(1, cells(hi.x1 - lo.x1));
        const std::size_t ny = std::max<std::size_t>(1, cells(hi.x2 - lo.x2));
        // Centre the (slightly larger) lattice on the requested window.
        const PhasePoint mid{(lo.x1 + hi.x1) / 2, (lo.x2 + hi.x2) / 2};
        const PhasePoint origin{mid.x1 - (static_cast<double>(nx) - 1) * dx / 2,
                                mid.x2 - (static_cast<double>(ny) - 1) * dx / 2};
        return {origin, dx, nx, ny};
    }

    /// n-by-n cells tiling the square of half-width `half_width` around `center`.
    static GridLayout square(PhasePoint center, double half_width, std::size_t n) {
        if (n == 0 || !(half_width > 0.0)) throw Error(ErrorKind::grid, "square grid needs n > 0 and a positive half-width");
        const double dx = 2.0 * half_width / static_cast<double>(n);
        const PhasePoint origin{center.x1 - half_width + dx / 2, center.x2 - half_width + dx / 2};
        return {origin, dx, n, n};
    }

    friend bool operator==(const GridLayout&, const GridLayout&) = default;
};

/// Square window [c - R, c + R]^2 with R = radius_widths * effective width.
inline std::pair<PhasePoint, PhasePoint> default_window(const StateSpec& state, double radius_widths = 6.0) {
    const PhasePoint c = center(state);
    const double r = radius_widths * effective_width(state);
    return {{c.x1 - r, c.x2 - r}, {c.x1 + r, c.x2 + r}};
}

/// Square window shared by two states: radius = max over both of |centre| + 6 widths.
inline std::pair<PhasePoint, PhasePoint> shared_window(const StateSpec& a, const StateSpec& b,
                                                       std::optional<double> radius = std::nullopt) {
    const double r = radius.value_or(std::max(center(a).norm() + 6.0 * effective_width(a),
                                              center(b).norm() + 6.0 * effective_width(b)));
    return {{-r, -r}, {r, r}};
}

/// Husimi density sampled at grid nodes. `mass` is sum(values) * dx^2 after
/// renormalisation; `raw_mass` is the same sum before it.
struct HusimiField {
    GridLayout layout;
    std::vector<double> values;
    double mass = 0.0;
    double raw_mass = 0.0;

    double at(std::size_t ix, std::size_t iy) const { return values[layout.index(ix, iy)]; }
};

struct CoverageLimits {
    double truncation_epsilon = 1e-6;
    double coverage_floor = 1e-3; // error when |raw mass - 1| exceeds this
};

inline HusimiField husimi_grid(const StateSpec& state, const GridLayout& layout, CoverageLimits limits = {}) {
    validate(state);
    if (layout.size() == 0 || !(layout.dx > 0.0)) throw Error(ErrorKind::grid, "empty grid");
    HusimiField field{layout, std::vector<double>(layout.size()), 0.0, 0.0};
    double sum = 0.0;
    for (std::size_t iy = 0; iy < layout.ny; ++iy)
        for (std::size_t ix = 0; ix < layout.nx; ++ix) {
            const double h = husimi_value(state, layout.node(ix, iy));
            field.values[layout.index(ix, iy)] = h;
            sum += h;
        }
    field.raw_mass = sum * layout.cell_area();
    if (field.raw_mass < 1.0 - limits.coverage_floor)
        throw Error(ErrorKind::insufficient_coverage,
                    "insufficient coverage: grid captures mass " + std::to_string(field.raw_mass));
    if (field.raw_mass > 1.0 + limits.coverage_floor)
        throw Error(ErrorKind::grid, "grid step too coarse: sampled mass " + std::to_string(field.raw_mass));
    const double scale = 1.0 / field.raw_mass;
    for (double& v : field.values) v *= scale;
    field.mass = 1.0;
    return field;
}

/// Field on the state's own default window (radius 6 widths unless given).
inline HusimiField husimi_grid(const StateSpec& state, double dx, std::optional<double> radius = std::nullopt,
                               CoverageLimits limits = {}) {
    const PhasePoint c = center(state);
    const double r = radius.value_or(6.0 * effective_width(state));
    return husimi_grid(state, GridLayout::covering({c.x1 - r, c.x2 - r}, {c.x1 + r, c.x2 + r}, dx), limits);
}

} // namespace monge
