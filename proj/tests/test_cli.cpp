#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "monge/cli.hpp"
#include "support.hpp"

using namespace monge;
using namespace monge::cli;

namespace {

const double sqrt_pi = std::sqrt(std::numbers::pi);

std::size_t parse_offset(std::string_view text) {
    try {
        parse_state(text);
    } catch (const ParseError& e) {
        return e.offset();
    }
    ADD_FAILURE() << "parsed: " << text;
    return std::string::npos;
}

std::string parse_message(std::string_view text) {
    try {
        parse_state(text);
    } catch (const ParseError& e) {
        return e.what();
    }
    return {};
}

struct CliRun {
    int status;
    std::string out;
};

CliRun run_cli(const std::string& args) {
    const std::string cmd = std::string(MONGE_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, {}};
    std::string out;
    std::array<char, 4096> buf{};
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    const int raw = pclose(pipe);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

} // namespace

TEST(ParseState, AcceptsEachKind) {
    EXPECT_EQ(parse_state("coherent:1.5-0.5i"), StateSpec(Coherent{{1.5, -0.5}}));
    EXPECT_EQ(parse_state("coherent:2"), StateSpec(Coherent{{2.0, 0.0}}));
    EXPECT_EQ(parse_state("coherent:-i"), StateSpec(Coherent{{0.0, -1.0}}));
    EXPECT_EQ(parse_state("coherent:0.25i"), StateSpec(Coherent{{0.0, 0.25}}));
    EXPECT_EQ(parse_state("vacuum"), StateSpec(Coherent{}));
    EXPECT_EQ(parse_state("fock:3"), StateSpec(Fock{3}));
    EXPECT_EQ(parse_state("thermal:0.5"), StateSpec(Thermal{0.5}));
    EXPECT_EQ(parse_state("squeezed:s=1"), StateSpec(Squeezed{1.0, 0.0, {}}));
    EXPECT_EQ(parse_state("squeezed:alpha=1+2i,theta=0.3,s=2"), StateSpec(Squeezed{2.0, 0.3, {1.0, 2.0}}));
}

TEST(ParseState, IgnoresWhitespaceBetweenTokens) {
    EXPECT_EQ(parse_state("  coherent : 1.5 - 0.5 i "), StateSpec(Coherent{{1.5, -0.5}}));
    EXPECT_EQ(parse_state("squeezed: s = 1 , theta = 2"), StateSpec(Squeezed{1.0, 2.0, {}}));
}

TEST(ParseState, ReportsOffsets) {
    EXPECT_EQ(parse_offset("fock:-1"), 5u);
    EXPECT_NE(parse_message("fock:-1").find("n must be ≥ 0"), std::string::npos);
    EXPECT_EQ(parse_offset("thermal:-2"), 8u);
    EXPECT_EQ(parse_offset("squeezed:s=1,phi=2"), 13u);
    EXPECT_NE(parse_message("squeezed:s=1,phi=2").find("unknown key 'phi'"), std::string::npos);
    EXPECT_EQ(parse_offset("squeezed:s=1,s=2"), 13u);
    EXPECT_NE(parse_message("squeezed:s=1,s=2").find("duplicate"), std::string::npos);
    EXPECT_NE(parse_message("squeezed:theta=1").find("missing required key s"), std::string::npos);
    EXPECT_EQ(parse_offset("laser:1"), 0u);
    EXPECT_EQ(parse_offset("fock:3x"), 6u);
    EXPECT_EQ(parse_offset("fock:99999999999"), 5u);
    EXPECT_EQ(parse_offset("coherent:1++2i"), 11u);
    EXPECT_NE(parse_offset("coherent:inf"), std::string::npos);
    EXPECT_NE(parse_offset("coherent:"), std::string::npos);
}

TEST(FormatState, RoundTripsRandomStates) {
    proptest::Gen gen(11);
    for (int k = 0; k < 300; ++k) {
        const StateSpec s = gen.state();
        const std::string text = format_state(s);
        EXPECT_EQ(parse_state(text), s) << text;
        EXPECT_EQ(format_state(parse_state(text)), text);
    }
    EXPECT_EQ(format_state(parse_state("vacuum")), "coherent:0+0i");
    EXPECT_EQ(format_state(parse_state("squeezed:s=1")), "squeezed:s=1,theta=0,alpha=0+0i");
    EXPECT_EQ(format_state(Coherent{{-0.0, -0.0}}), "coherent:0+0i");
}

TEST(ParseP, AcceptsRealsAtLeastOneAndInfinity) {
    EXPECT_TRUE(parse_p("inf").is_infinite());
    EXPECT_EQ(parse_p("1.5"), PNorm(1.5));
    EXPECT_THROW(parse_p("0.5"), ParseError);
    EXPECT_THROW(parse_p("2x"), ParseError);
}

TEST(Dispatch, AutomaticPicksTheCheapestExactMethod) {
    RunConfig cfg;
    EXPECT_EQ(cmd_dist("coherent:0", "coherent:1", cfg).method, Method::analytic);
    EXPECT_EQ(cmd_dist("thermal:1", "fock:2", cfg).method, Method::salvemini);
    cfg.grid = GridParams{.dx = 0.5};
    EXPECT_EQ(cmd_dist("coherent:1", "fock:1", cfg).method, Method::transport);
    cfg.p = PNorm::infinity();
    EXPECT_THROW(cmd_dist("coherent:1", "fock:1", cfg), Error);
    EXPECT_EQ(cmd_dist("vacuum", "squeezed:s=1", cfg).value, 1.0);
    cfg.method = MethodChoice::transport;
    EXPECT_THROW(cmd_dist("vacuum", "coherent:1", cfg), Error);
    cfg.method = MethodChoice::analytic;
    cfg.p = PNorm(1.0);
    EXPECT_THROW(cmd_dist("fock:1", "coherent:1", cfg), Error);
}

TEST(Dispatch, AutomaticAgreesWithTransport) {
    RunConfig aut, tr;
    tr.method = MethodChoice::transport;
    tr.grid = GridParams{.dx = 0.25, .max_peaks = 1024};
    for (const auto& [a, b] : std::vector<std::pair<const char*, const char*>>{
             {"coherent:0", "coherent:0.7+0.4i"}, {"thermal:1", "thermal:2"}, {"fock:0", "fock:1"}}) {
        const double x = cmd_dist(a, b, aut).value, y = cmd_dist(a, b, tr).value;
        EXPECT_NEAR(y / x, 1.0, 0.05) << a << " " << b;
    }
    // The affine squeeze map is feasible, so its p = 1 cost bounds the optimum from above.
    const double bound = cmd_dist("vacuum", "squeezed:s=1", aut).value;
    const double t = cmd_dist("vacuum", "squeezed:s=1", tr).value;
    EXPECT_LT(t, bound * 1.05);
    EXPECT_GT(t, sqrt_pi / 2 * 0.6);
}

TEST(Json, ResultIsByteIdenticalAcrossRuns) {
    RunConfig cfg;
    cfg.grid = GridParams{.dx = 0.5};
    const StateSpec a = parse_state("fock:1"), b = parse_state("coherent:1");
    const std::string first = io::canonical_dump(result_json(a, b, cmd_dist(a, b, cfg)));
    EXPECT_EQ(first, io::canonical_dump(result_json(a, b, cmd_dist(a, b, cfg))));
    const auto j = io::json::parse(first);
    EXPECT_EQ(j.at("method"), "transport");
    EXPECT_EQ(j.at("a"), "fock:1");
    EXPECT_LT(first.find("\"a\""), first.find("\"b\""));
}

TEST(Json, NonFiniteBecomesNull) {
    EXPECT_EQ(io::canonical_dump(io::json{{"x", std::numeric_limits<double>::infinity()}, {"a", 0.1}}),
              "{\"a\":0.10000000000000001,\"x\":null}");
}

TEST(Husimi, CsvAndJsonRoundTrip) {
    for (const char* text : {"coherent:0.5-1i", "fock:2", "squeezed:s=1,theta=0.4"}) {
        const HusimiField f = cmd_husimi(parse_state(text), 0.25);
        std::stringstream csv;
        io::write_csv(csv, f);
        const HusimiField g = io::field_from_csv(csv);
        EXPECT_EQ(g.layout.nx, f.layout.nx) << text;
        EXPECT_EQ(g.layout.ny, f.layout.ny);
        EXPECT_EQ(g.layout.dx, f.layout.dx);
        EXPECT_EQ(g.values, f.values);
        const HusimiField h = io::field_from_json(io::json::parse(io::canonical_dump(io::to_json(f))));
        EXPECT_EQ(h.values, f.values);
        EXPECT_EQ(h.raw_mass, f.raw_mass);
        EXPECT_NEAR(h.mass, 1.0, 1e-12);
    }
    std::stringstream bad("x,y,h\n");
    EXPECT_THROW(io::field_from_csv(bad), Error);
}

TEST(Regression, FockOneAgainstCoherentOne) {
    RunConfig cfg;
    cfg.method = MethodChoice::transport;
    cfg.grid.dx = 0.2;
    const DistanceResult r = cmd_dist("fock:1", "coherent:1", cfg);
    EXPECT_NEAR(r.value, 1.0478365195956896, 1.0478365195956896 * 1e-9);
    EXPECT_EQ(r.diagnostics.at("peaks_source"), 2536.0);
    EXPECT_EQ(r.diagnostics.at("peaks_sink"), 2177.0);
}

TEST(Table, ClosedFormsAndRadialColumn) {
    const auto rows = cmd_table({.transport = false});
    ASSERT_EQ(rows.size(), 12u);
    for (const auto& r : rows) EXPECT_TRUE(r.pass) << r.a << " " << r.b;
    EXPECT_NEAR(rows[11].analytic, sqrt_pi * 5.0 / 32.0, 1e-15);
    EXPECT_NEAR(rows[8].analytic, sqrt_pi / 2 * (std::sqrt(3.0) - std::sqrt(2.0)), 1e-15);
    EXPECT_NEAR(rows[9].analytic, sqrt_pi / 4, 1e-15);
    EXPECT_TRUE(rows[1].upper_bound);
    EXPECT_FALSE(rows[2].upper_bound);
    EXPECT_FALSE(rows[3].radial);
    std::ostringstream plain, csv;
    write_table(plain, rows, OutputFormat::plain);
    write_table(csv, rows, OutputFormat::csv);
    EXPECT_NE(plain.str().find("(analytic is an upper bound)"), std::string::npos);
    const std::string text = csv.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 13);
}

TEST(Converge, IdenticalStatesGiveZeroAndCoherentErrorsShrink) {
    const auto zero = cmd_converge(Fock{1}, Fock{1}, {0.5, 0.3}, 1.0);
    for (const auto& r : zero) EXPECT_NEAR(r.distance, 0.0, 1e-12);
    const auto rows = cmd_converge(Coherent{}, Coherent{{0.8 * std::cos(0.3), 0.8 * std::sin(0.3)}}, {0.5, 0.25}, 1.0);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_LT(rows[1].abs_error, rows[0].abs_error);
    EXPECT_GT(rows[1].n, rows[0].n);
    EXPECT_THROW(cmd_converge(Fock{1}, Coherent{{1, 0}}, {0.5}, 1.0), Error);
    std::ostringstream os;
    write_converge(os, rows);
    EXPECT_EQ(os.str().substr(0, 37), "dx,N,M,distance,abs_error,solve_time\n");
}

TEST(Executable, ExitCodesAndOutput) {
    const CliRun ok = run_cli("dist coherent:0 coherent:1");
    EXPECT_EQ(ok.status, 0);
    EXPECT_NEAR(std::stod(ok.out), 1.0, 1e-15);
    const CliRun js = run_cli("dist vacuum thermal:3 --output json");
    EXPECT_EQ(js.status, 0);
    EXPECT_NEAR(io::json::parse(js.out).at("value").get<double>(), sqrt_pi / 2, 1e-15);
    EXPECT_EQ(run_cli("dist fock:-1 vacuum").status, 2);
    EXPECT_EQ(run_cli("dist vacuum").status, 2);
    EXPECT_EQ(run_cli("").status, 2);
    EXPECT_EQ(run_cli("dist coherent:1 vacuum -p inf --method transport").status, 3);
    EXPECT_EQ(run_cli("dist fock:1 vacuum --grid dx=abc").status, 2);
    const CliRun csv = run_cli("husimi vacuum --dx 1 --output csv");
    EXPECT_EQ(csv.status, 0);
    EXPECT_EQ(csv.out.substr(0, 8), "x1,x2,h\n");
    EXPECT_EQ(run_cli("table --no-transport").status, 0);
}
