// State-text parsing and the commands behind the `monge` executable.
#pragma once

#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "monge/analytic.hpp"
#include "monge/distance.hpp"
#include "monge/error.hpp"
#include "monge/grid.hpp"
#include "monge/io.hpp"
#include "monge/onedim.hpp"
#include "monge/states.hpp"
#include "monge/transport.hpp"

namespace monge::cli {

namespace detail {

class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }
    bool accept(char c) {
        if (peek() != c) return false;
        ++pos_;
        return true;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    std::string_view word() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return text_.substr(start, pos_ - start);
    }
    double number() {
        skip_ws();
        std::size_t start = pos_;
        bool negative = false;
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
            negative = text_[pos_] == '-';
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) fail("expected a digit");
        }
        double v = 0.0;
        const char* first = text_.data() + pos_;
        const auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), v);
        if (ec != std::errc{} || ptr == first) {
            pos_ = start;
            fail("expected a number");
        }
        // from_chars also accepts "inf" and "nan"; neither is a valid parameter.
        if (!std::isfinite(v)) {
            pos_ = start;
            fail("expected a finite number");
        }
        pos_ += static_cast<std::size_t>(ptr - first);
        return negative ? -v : v;
    }
    std::size_t pos() const { return pos_; }
    void set_pos(std::size_t p) { pos_ = p; }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }
    [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const { throw ParseError(at, msg); }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

// <re>, <im>i, <re>[+|-]<im>i, and the shorthand i / -i for unit imaginary parts.
inline PhasePoint complex_number(Cursor& c) {
    const auto unit_imag = [&](double sign) -> std::optional<double> {
        if (c.peek() == 'i') {
            c.accept('i');
            return sign;
        }
        return std::nullopt;
    };
    double sign = 1.0;
    const std::size_t start = c.pos();
    if (c.accept('-')) sign = -1.0;
    else c.accept('+');
    if (auto im = unit_imag(sign)) return {0.0, *im};
    c.set_pos(start);
    const double first = c.number();
    if (c.accept('i')) return {0.0, first};
    const char op = c.peek();
    if (op != '+' && op != '-') return {first, 0.0};
    c.accept(op);
    const double s2 = op == '-' ? -1.0 : 1.0;
    if (auto im = unit_imag(s2)) return {first, *im};
    const std::size_t at = (c.skip_ws(), c.pos());
    if (c.peek() == '+' || c.peek() == '-') c.fail_at(at, "expected an unsigned imaginary part");
    const double second = c.number();
    c.expect('i');
    return {first, s2 * second};
}

inline std::string shortest(double v) {
    v += 0.0; // folds -0 into +0
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace detail

/// Parses `coherent:<re>[+|-]<im>i`, `fock:<n>`, `thermal:<nbar>`,
/// `squeezed:s=<s>[,theta=<rad>][,alpha=<re>[+|-]<im>i]` or `vacuum`.
/// Whitespace between tokens is ignored.
inline StateSpec parse_state(std::string_view text) {
    detail::Cursor c(text);
    const std::size_t kind_at = (c.skip_ws(), c.pos());
    const std::string_view kind = c.word();
    StateSpec state;
    if (kind == "vacuum") {
        state = Coherent{};
    } else if (kind == "coherent") {
        c.expect(':');
        state = Coherent{detail::complex_number(c)};
    } else if (kind == "fock") {
        c.expect(':');
        const std::size_t at = (c.skip_ws(), c.pos());
        if (c.peek() == '-') c.fail_at(at, "n must be ≥ 0");
        std::uint64_t n = 0;
        std::size_t digits = 0;
        while (std::isdigit(static_cast<unsigned char>(text.size() > c.pos() ? text[c.pos()] : '\0'))) {
            n = n * 10 + static_cast<std::uint64_t>(text[c.pos()] - '0');
            if (n > UINT32_MAX) c.fail_at(at, "photon number too large");
            c.set_pos(c.pos() + 1);
            ++digits;
        }
        if (digits == 0) c.fail_at(at, "expected a non-negative integer photon number");
        state = Fock{static_cast<std::uint32_t>(n)};
    } else if (kind == "thermal") {
        c.expect(':');
        const std::size_t at = (c.skip_ws(), c.pos());
        const double nbar = c.number();
        if (nbar < 0.0) c.fail_at(at, "nbar must be ≥ 0");
        state = Thermal{nbar};
    } else if (kind == "squeezed") {
        c.expect(':');
        Squeezed q;
        bool seen_s = false, seen_theta = false, seen_alpha = false;
        do {
            const std::size_t key_at = (c.skip_ws(), c.pos());
            const std::string_view key = c.word();
            const auto once = [&](bool& seen) {
                if (seen) c.fail_at(key_at, "duplicate key '" + std::string(key) + "'");
                seen = true;
            };
            if (key == "s") {
                once(seen_s);
                c.expect('=');
                const std::size_t at = (c.skip_ws(), c.pos());
                q.s = c.number();
                if (q.s < 0.0) c.fail_at(at, "s must be ≥ 0");
            } else if (key == "theta") {
                once(seen_theta);
                c.expect('=');
                q.theta = c.number();
            } else if (key == "alpha") {
                once(seen_alpha);
                c.expect('=');
                q.alpha = detail::complex_number(c);
            } else {
                c.fail_at(key_at, key.empty() ? "expected one of s, theta, alpha"
                                              : "unknown key '" + std::string(key) + "' (expected s, theta or alpha)");
            }
        } while (c.accept(','));
        if (!seen_s) c.fail("missing required key s");
        state = q;
    } else {
        c.fail_at(kind_at, "expected coherent, squeezed, fock, thermal or vacuum");
    }
    if (!c.at_end()) c.fail("unexpected trailing input");
    return state;
}

inline std::string format_complex(PhasePoint a) {
    const double im = a.x2 + 0.0;
    return detail::shortest(a.x1) + (std::signbit(im) ? "-" : "+") + detail::shortest(std::abs(im)) + "i";
}

/// Canonical text; parse_state(format_state(x)) == x.
inline std::string format_state(const StateSpec& state) {
    return std::visit(overloaded{
                          [](const Coherent& c) { return "coherent:" + format_complex(c.alpha); },
                          [](const Squeezed& q) {
                              return "squeezed:s=" + detail::shortest(q.s) + ",theta=" + detail::shortest(q.theta) +
                                     ",alpha=" + format_complex(q.alpha);
                          },
                          [](const Fock& f) { return "fock:" + std::to_string(f.n); },
                          [](const Thermal& t) { return "thermal:" + detail::shortest(t.nbar); },
                      },
                      state);
}

enum class MethodChoice { automatic, analytic, radial, transport };
enum class OutputFormat { plain, json, csv };

struct RunConfig {
    MethodChoice method = MethodChoice::automatic;
    PNorm p{1.0};
    GridParams grid;
    OutputFormat output = OutputFormat::plain;
    std::uint64_t seed = 0;
};

/// Accepts "inf" or a real >= 1.
inline PNorm parse_p(std::string_view text) {
    if (text == "inf" || text == "infinity") return PNorm::infinity();
    detail::Cursor c(text);
    const double v = c.number();
    if (!c.at_end()) c.fail("unexpected trailing input in p");
    if (v < 1.0) c.fail_at(0, "p must be >= 1 or inf");
    return PNorm(v);
}

inline DistanceResult cmd_dist(const StateSpec& a, const StateSpec& b, const RunConfig& cfg) {
    validate(a);
    validate(b);
    const bool symmetric = is_rotationally_symmetric(a) && is_rotationally_symmetric(b);
    switch (cfg.method) {
    case MethodChoice::analytic:
        if (auto r = closed_form(a, b, cfg.p)) return *r;
        throw Error(ErrorKind::unsupported, "no closed form for " + format_state(a) + " vs " + format_state(b) +
                                                " at p = " + to_string(cfg.p));
    case MethodChoice::radial: return monge_radial(a, b, cfg.p);
    case MethodChoice::transport:
        if (cfg.p.is_infinite()) throw Error(ErrorKind::unsupported, "p = inf is not available with the transport method");
        return monge_numeric(a, b, cfg.grid, cfg.p.value());
    case MethodChoice::automatic:
        if (auto r = closed_form(a, b, cfg.p)) return *r;
        if (symmetric && !cfg.p.is_infinite()) return monge_radial(a, b, cfg.p);
        if (cfg.p.is_infinite()) throw Error(ErrorKind::unsupported, "p = inf is not available with the transport method");
        return monge_numeric(a, b, cfg.grid, cfg.p.value());
    }
    throw Error(ErrorKind::unsupported, "unknown method");
}

inline DistanceResult cmd_dist(std::string_view a, std::string_view b, const RunConfig& cfg) {
    return cmd_dist(parse_state(a), parse_state(b), cfg);
}

/// {a, b, method, p, value, diagnostics}
inline io::json result_json(const StateSpec& a, const StateSpec& b, const DistanceResult& r) {
    io::json j = io::to_json(r);
    j["a"] = format_state(a);
    j["b"] = format_state(b);
    return j;
}

struct TableRow {
    std::string a, b;
    PNorm p{1.0};
    double analytic = 0.0;
    std::optional<double> radial, transport;
    std::optional<double> radial_error, transport_error; // relative to analytic
    bool upper_bound = false; // analytic value is the cost of a feasible, not necessarily optimal, plan
    bool pass = true;
};

struct TableOptions {
    bool transport = true;
    GridParams grid{.dx = 0.25, .max_peaks = 1024};
    double radial_tolerance = 1e-6;
    double transport_tolerance = 0.05;
};

/// Every closed-form example next to the radial and transport estimates.
inline std::vector<TableRow> cmd_table(const TableOptions& opts = {}) {
    struct Case {
        const char* a;
        const char* b;
        PNorm p;
    };
    const PNorm inf = PNorm::infinity();
    const std::vector<Case> cases = {
        {"coherent:0", "coherent:1", PNorm(1.0)},
        {"vacuum", "squeezed:s=1", PNorm(1.0)},
        {"vacuum", "squeezed:s=1", PNorm(2.0)},
        {"vacuum", "squeezed:s=1", inf},
        {"vacuum", "squeezed:s=2", PNorm(1.0)},
        {"vacuum", "squeezed:s=2", PNorm(2.0)},
        {"vacuum", "squeezed:s=2", inf},
        {"vacuum", "thermal:3", PNorm(1.0)},
        {"thermal:1", "thermal:2", PNorm(1.0)},
        {"fock:0", "fock:1", PNorm(1.0)},
        {"fock:1", "fock:2", PNorm(1.0)},
        {"fock:2", "fock:3", PNorm(1.0)},
    };
    std::vector<TableRow> rows;
    for (const auto& cs : cases) {
        const StateSpec a = parse_state(cs.a), b = parse_state(cs.b);
        TableRow row{cs.a, cs.b, cs.p, closed_form(a, b, cs.p).value().value, {}, {}, {}, {}, false, true};
        // The affine squeeze is optimal for p = 2 only; at p = 1 its cost bounds the distance from above.
        row.upper_bound = std::holds_alternative<Squeezed>(b) && cs.p == PNorm(1.0);
        const auto rel = [&](double v) { return row.analytic == 0.0 ? std::abs(v) : std::abs(v - row.analytic) / row.analytic; };
        if (is_rotationally_symmetric(a) && is_rotationally_symmetric(b) && !cs.p.is_infinite()) {
            row.radial = monge_radial(a, b, cs.p).value;
            row.radial_error = rel(*row.radial);
            row.pass = row.pass && *row.radial_error < opts.radial_tolerance;
        }
        if (opts.transport && !cs.p.is_infinite()) {
            row.transport = monge_numeric(a, b, opts.grid, cs.p.value()).value;
            row.transport_error = rel(*row.transport);
            row.pass = row.pass && (row.upper_bound ? *row.transport < row.analytic * (1.0 + opts.transport_tolerance)
                                                    : *row.transport_error < opts.transport_tolerance);
        }
        rows.push_back(row);
    }
    return rows;
}

struct ConvergeRow {
    double dx = 0.0;
    std::size_t n = 0, m = 0;
    double distance = 0.0;
    double abs_error = 0.0;
    double solve_seconds = 0.0;
};

/// Transport estimates over a list of grid steps against a reference value.
/// The reference is the closed form or radial value unless one is supplied.
inline std::vector<ConvergeRow> cmd_converge(const StateSpec& a, const StateSpec& b, const std::vector<double>& dx_list,
                                             double p, std::optional<double> reference = std::nullopt,
                                             GridParams base = {}) {
    if (!reference) {
        if (auto r = closed_form(a, b, PNorm(p))) reference = r->value;
        else if (is_rotationally_symmetric(a) && is_rotationally_symmetric(b)) reference = monge_radial(a, b, PNorm(p)).value;
        else throw Error(ErrorKind::unsupported, "no analytic or radial reference for this pair; supply one");
    }
    std::vector<ConvergeRow> rows;
    for (double dx : dx_list) {
        GridParams g = base;
        g.dx = dx;
        const auto t0 = std::chrono::steady_clock::now();
        const DistanceResult r = monge_numeric(a, b, g, p);
        const auto t1 = std::chrono::steady_clock::now();
        rows.push_back({dx, static_cast<std::size_t>(r.diagnostics.at("peaks_source")),
                        static_cast<std::size_t>(r.diagnostics.at("peaks_sink")), r.value,
                        std::abs(r.value - *reference), std::chrono::duration<double>(t1 - t0).count()});
    }
    return rows;
}

/// Husimi field of one state on its default window, or a square window of the given radius.
inline HusimiField cmd_husimi(const StateSpec& a, double dx, std::optional<double> radius = std::nullopt) {
    return husimi_grid(a, dx, radius);
}

inline void write_table(std::ostream& os, const std::vector<TableRow>& rows, OutputFormat fmt) {
    const auto opt = [](const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); };
    if (fmt == OutputFormat::json) {
        io::json arr = io::json::array();
        for (const auto& r : rows) {
            io::json j{{"a", r.a}, {"b", r.b}, {"p", to_string(r.p)}, {"analytic", r.analytic}, {"pass", r.pass},
                      {"analytic_is_upper_bound", r.upper_bound}};
            if (r.radial) j["radial"] = *r.radial, j["radial_rel_error"] = *r.radial_error;
            if (r.transport) j["transport"] = *r.transport, j["transport_rel_error"] = *r.transport_error;
            arr.push_back(j);
        }
        os << io::canonical_dump(arr) << '\n';
        return;
    }
    if (fmt == OutputFormat::csv) {
        os << "a,b,p,analytic,analytic_is_upper_bound,radial,radial_rel_error,transport,transport_rel_error,pass\n";
        for (const auto& r : rows)
            os << r.a << ',' << r.b << ',' << to_string(r.p) << ',' << io::format_double(r.analytic) << ','
               << (r.upper_bound ? "yes" : "no") << ',' << opt(r.radial) << ',' << opt(r.radial_error) << ',' << opt(r.transport) << ','
               << opt(r.transport_error) << ',' << (r.pass ? "yes" : "no") << '\n';
        return;
    }
    char line[256];
    std::snprintf(line, sizeof line, "%-12s %-14s %-4s %-12s %-12s %-9s %-12s %-9s %s\n", "a", "b", "p", "analytic",
                  "radial", "rel.err", "transport", "rel.err", "pass");
    os << line;
    const auto cell = [](const std::optional<double>& v, const char* f) {
        if (!v) return std::string("-");
        char b[32];
        std::snprintf(b, sizeof b, f, *v);
        return std::string(b);
    };
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-12s %-14s %-4s %-12.9f %-12s %-9s %-12s %-9s %s%s\n", r.a.c_str(),
                      r.b.c_str(), to_string(r.p).c_str(), r.analytic, cell(r.radial, "%.9f").c_str(),
                      cell(r.radial_error, "%.1e").c_str(), cell(r.transport, "%.9f").c_str(),
                      cell(r.transport_error, "%.1e").c_str(), r.pass ? "yes" : "NO",
                      r.upper_bound ? "  (analytic is an upper bound)" : "");
        os << line;
    }
}

inline void write_converge(std::ostream& os, const std::vector<ConvergeRow>& rows) {
    os << "dx,N,M,distance,abs_error,solve_time\n";
    for (const auto& r : rows)
        os << io::format_double(r.dx) << ',' << r.n << ',' << r.m << ',' << io::format_double(r.distance) << ','
           << io::format_double(r.abs_error) << ',' << io::format_double(r.solve_seconds) << '\n';
}

} // namespace monge::cli
