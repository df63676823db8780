// CSV and JSON encodings of grids, plans and distance results.
//
// JSON output is canonical: object keys sorted, doubles printed with 17
// significant digits, so identical inputs give byte-identical files.
#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "monge/distance.hpp"
#include "monge/error.hpp"
#include "monge/grid.hpp"
#include "monge/lamcheck.hpp"
#include "monge/transport.hpp"

namespace monge::io {

using nlohmann::json;

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline void dump(const json& j, std::string& out) {
    switch (j.type()) {
    case json::value_t::object: {
        out += '{';
        bool first = true;
        for (const auto& [k, v] : j.items()) { // std::map storage: sorted keys
            if (!first) out += ',';
            first = false;
            out += json(k).dump();
            out += ':';
            dump(v, out);
        }
        out += '}';
        break;
    }
    case json::value_t::array: {
        out += '[';
        for (std::size_t k = 0; k < j.size(); ++k) {
            if (k) out += ',';
            dump(j[k], out);
        }
        out += ']';
        break;
    }
    case json::value_t::number_float: {
        const double v = j.get<double>();
        out += std::isfinite(v) ? format_double(v) : "null";
        break;
    }
    default: out += j.dump();
    }
}

} // namespace detail

inline std::string canonical_dump(const json& j) {
    std::string out;
    detail::dump(j, out);
    return out;
}

inline json to_json(const GridLayout& g, std::span<const double> values) {
    return json{{"origin", json::array({g.origin.x1, g.origin.x2})},
                {"dx", g.dx},
                {"nx", g.nx},
                {"ny", g.ny},
                {"values", std::vector<double>(values.begin(), values.end())}};
}

inline json to_json(const HusimiField& f) {
    json j = to_json(f.layout, f.values);
    j["raw_mass"] = f.raw_mass;
    return j;
}

inline json to_json(const ScalarField2D& f) {
    json j = to_json(f.layout, f.values);
    if (!f.mask.empty()) j["mask"] = f.mask;
    return j;
}

inline json to_json(const DistanceResult& r) {
    json diag = json::object();
    for (const auto& [k, v] : r.diagnostics) diag[k] = v;
    return json{{"value", r.value},
                {"method", to_string(r.method)},
                {"p", r.p.is_infinite() ? json("inf") : json(r.p.value())},
                {"diagnostics", diag}};
}

inline json to_json(const TransportPlan& plan) {
    json cells = json::array();
    for (const auto& s : plan.basis) cells.push_back(json{{"i", s.i}, {"j", s.j}, {"mass", s.mass}});
    return json{{"basis", cells},
                {"total_cost", plan.total_cost},
                {"u", plan.u},
                {"v", plan.v},
                {"diagnostics",
                 json{{"optimal", plan.optimal},
                      {"iterations", plan.iterations},
                      {"degenerate_pivots", plan.degenerate_pivots},
                      {"lexicographic", plan.lexicographic},
                      {"min_reduced_cost", std::isnan(plan.min_reduced_cost) ? json(nullptr) : json(plan.min_reduced_cost)}}}};
}

/// Grid in the JSON layout {origin, dx, nx, ny, values (row-major)}.
inline HusimiField field_from_json(const json& j) {
    try {
        HusimiField f;
        f.layout.origin = {j.at("origin").at(0).get<double>(), j.at("origin").at(1).get<double>()};
        f.layout.dx = j.at("dx").get<double>();
        f.layout.nx = j.at("nx").get<std::size_t>();
        f.layout.ny = j.at("ny").get<std::size_t>();
        f.values = j.at("values").get<std::vector<double>>();
        if (f.values.size() != f.layout.size()) throw Error(ErrorKind::parse, "grid JSON: values do not match nx * ny");
        double sum = 0.0;
        for (double v : f.values) sum += v;
        f.mass = sum * f.layout.cell_area();
        f.raw_mass = j.contains("raw_mass") ? j["raw_mass"].get<double>() : f.mass;
        return f;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::parse, std::string("grid JSON: ") + e.what());
    }
}

/// CSV with header `x1,x2,h`, one node per line in row-major order.
inline void write_csv(std::ostream& os, const GridLayout& g, std::span<const double> values) {
    os << "x1,x2,h\n";
    for (std::size_t k = 0; k < g.size(); ++k) {
        const PhasePoint x = g.node(k);
        os << format_double(x.x1) << ',' << format_double(x.x2) << ',' << format_double(values[k]) << '\n';
    }
}

inline void write_csv(std::ostream& os, const HusimiField& f) { write_csv(os, f.layout, f.values); }

/// Reads the `x1,x2,h` CSV back; the lattice is recovered from the coordinates.
inline HusimiField field_from_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "x1,x2,h") throw Error(ErrorKind::parse, "grid CSV: expected header x1,x2,h");
    std::vector<double> xs, ys, hs;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        double x = 0, y = 0, h = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ss(line);
        if (!(ss >> x >> c1 >> y >> c2 >> h) || c1 != ',' || c2 != ',')
            throw Error(ErrorKind::parse, "grid CSV: malformed line " + std::to_string(lineno));
        xs.push_back(x);
        ys.push_back(y);
        hs.push_back(h);
    }
    if (xs.size() < 2) throw Error(ErrorKind::parse, "grid CSV: need at least two nodes");
    std::size_t nx = 1;
    while (nx < ys.size() && ys[nx] == ys[0]) ++nx;
    if (ys.size() % nx != 0) throw Error(ErrorKind::parse, "grid CSV: rows of unequal length");
    HusimiField f;
    f.layout.origin = {xs[0], ys[0]};
    f.layout.nx = nx;
    f.layout.ny = ys.size() / nx;
    f.layout.dx = nx > 1 ? xs[1] - xs[0] : ys[nx] - ys[0];
    f.values = std::move(hs);
    double sum = 0.0;
    for (double v : f.values) sum += v;
    f.mass = sum * f.layout.cell_area();
    f.raw_mass = f.mass;
    return f;
}

/// CSV with header `i,j,mass,cost` listing the positive shipments.
inline void write_csv(std::ostream& os, const TransportProblem& problem, const TransportPlan& plan) {
    os << "i,j,mass,cost\n";
    for (const auto& s : plan.shipments())
        os << s.i << ',' << s.j << ',' << format_double(s.mass) << ',' << format_double(problem.cost(s.i, s.j)) << '\n';
}

} // namespace monge::io
