#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "monge/cli.hpp"

namespace {

using namespace monge;
using monge::cli::OutputFormat;

// "dx=0.2,radius=8,peaks=4096,cells=64"; radius=auto keeps the default window.
GridParams parse_grid(const std::string& text, GridParams g) {
    std::stringstream ss(text);
    std::string item;
    std::size_t offset = 0;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ParseError(offset, "grid: expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
        std::size_t used = 0;
        double v = 0.0;
        if (!(key == "radius" && val == "auto")) {
            try {
                v = std::stod(val, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != val.size() || !(v > 0.0)) throw ParseError(offset + eq + 1, "grid: expected a positive number for " + key);
        }
        if (key == "dx") g.dx = v;
        else if (key == "radius") g.radius = val == "auto" ? std::nullopt : std::optional<double>(v);
        else if (key == "peaks" || key == "max_peaks") g.max_peaks = static_cast<std::size_t>(v);
        else if (key == "cells") g.cells = static_cast<std::size_t>(v);
        else throw ParseError(offset, "grid: unknown key '" + key + "' (expected dx, radius, peaks or cells)");
        offset += item.size() + 1;
    }
    return g;
}

std::filesystem::path output_path(const std::string& out) {
    std::filesystem::path p(out);
    if (p.is_relative())
        if (const char* dir = std::getenv("MONGE_OUTPUT_DIR"); dir && *dir) p = std::filesystem::path(dir) / p;
    return p;
}

template <class Fn>
void emit(const std::string& out, Fn&& write) {
    if (out.empty()) {
        write(std::cout);
        return;
    }
    const auto path = output_path(out);
    std::ofstream f(path);
    if (!f) throw Error(ErrorKind::domain, "cannot open " + path.string() + " for writing");
    write(f);
}

const std::map<std::string, OutputFormat> formats{
    {"plain", OutputFormat::plain}, {"json", OutputFormat::json}, {"csv", OutputFormat::csv}};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monge distances between quantum states via Husimi functions"};
    app.require_subcommand(1);

    std::string a, b, p_text = "1", grid_text, out;
    OutputFormat fmt = OutputFormat::plain;
    std::uint64_t seed = 0;

    auto* dist = app.add_subcommand("dist", "distance between two states");
    std::string method = "auto";
    dist->add_option("a", a, "first state, e.g. coherent:1+0.5i")->required();
    dist->add_option("b", b, "second state")->required();
    dist->add_option("--method", method, "auto, analytic, radial or transport")
        ->check(CLI::IsMember({"auto", "analytic", "radial", "transport"}));
    dist->add_option("-p,--p", p_text, "order p >= 1 or inf");
    dist->add_option("--grid", grid_text, "transport grid: dx=..,radius=..|auto,peaks=..,cells=..");
    dist->add_option("--output", fmt, "plain, json or csv")->transform(CLI::CheckedTransformer(formats))->option_text("plain|json|csv");
    dist->add_option("--seed", seed, "seed recorded with the run");
    dist->add_option("--out", out, "write to file (relative to $MONGE_OUTPUT_DIR if set)");

    auto* table = app.add_subcommand("table", "closed-form examples next to numeric estimates");
    bool no_transport = false;
    table->add_flag("--no-transport", no_transport, "skip the transport column");
    table->add_option("--grid", grid_text, "transport grid for the table");
    table->add_option("--output", fmt, "plain, json or csv")->transform(CLI::CheckedTransformer(formats))->option_text("plain|json|csv");
    table->add_option("--out", out, "write to file");

    auto* converge = app.add_subcommand("converge", "transport error over a sequence of grid steps");
    std::vector<double> dx_list{0.5, 0.25, 0.125};
    std::optional<double> reference;
    converge->add_option("a", a)->required();
    converge->add_option("b", b)->required();
    converge->add_option("--dx", dx_list, "grid steps")->delimiter(',');
    converge->add_option("-p,--p", p_text, "order p >= 1");
    converge->add_option("--reference", reference, "reference value when no closed form exists");
    converge->add_option("--grid", grid_text, "other grid settings (radius, peaks)");
    converge->add_option("--out", out, "write CSV to file");

    auto* husimi = app.add_subcommand("husimi", "dump a Husimi function on a grid");
    double dx = 0.125;
    std::optional<double> radius;
    fmt = OutputFormat::csv;
    husimi->add_option("a", a)->required();
    husimi->add_option("--dx", dx, "grid step")->check(CLI::PositiveNumber);
    husimi->add_option("--radius", radius, "half-width of the window about the state's centre");
    husimi->add_option("--output", fmt, "csv or json")->transform(CLI::CheckedTransformer(formats))->option_text("csv|json");
    husimi->add_option("--out", out, "write to file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    if (dist->parsed() && !dist->count("--output")) fmt = OutputFormat::plain;
    if (table->parsed() && !table->count("--output")) fmt = OutputFormat::plain;

    try {
        if (dist->parsed()) {
            cli::RunConfig cfg;
            cfg.method = method == "analytic"    ? cli::MethodChoice::analytic
                         : method == "radial"    ? cli::MethodChoice::radial
                         : method == "transport" ? cli::MethodChoice::transport
                                                 : cli::MethodChoice::automatic;
            cfg.p = cli::parse_p(p_text);
            if (!grid_text.empty()) cfg.grid = parse_grid(grid_text, cfg.grid);
            cfg.output = fmt;
            cfg.seed = seed;
            const StateSpec sa = cli::parse_state(a), sb = cli::parse_state(b);
            const DistanceResult r = cli::cmd_dist(sa, sb, cfg);
            emit(out, [&](std::ostream& os) {
                if (fmt == OutputFormat::json) {
                    os << io::canonical_dump(cli::result_json(sa, sb, r)) << '\n';
                } else if (fmt == OutputFormat::csv) {
                    os << "a,b,method,p,value\n"
                       << cli::format_state(sa) << ',' << cli::format_state(sb) << ',' << to_string(r.method) << ','
                       << to_string(r.p) << ',' << io::format_double(r.value) << '\n';
                } else {
                    os << io::format_double(r.value) << "  (" << to_string(r.method) << ", p=" << to_string(r.p) << ")\n";
                    for (const auto& [k, v] : r.diagnostics) os << "  " << k << " = " << io::format_double(v) << '\n';
                }
            });
        } else if (table->parsed()) {
            cli::TableOptions opts;
            opts.transport = !no_transport;
            if (!grid_text.empty()) opts.grid = parse_grid(grid_text, opts.grid);
            const auto rows = cli::cmd_table(opts);
            emit(out, [&](std::ostream& os) { cli::write_table(os, rows, fmt); });
            for (const auto& r : rows)
                if (!r.pass) return 3;
        } else if (converge->parsed()) {
            GridParams g;
            if (!grid_text.empty()) g = parse_grid(grid_text, g);
            const PNorm p = cli::parse_p(p_text);
            if (p.is_infinite()) throw Error(ErrorKind::unsupported, "p = inf is not available with the transport method");
            const auto rows = cli::cmd_converge(cli::parse_state(a), cli::parse_state(b), dx_list, p.value(), reference, g);
            emit(out, [&](std::ostream& os) { cli::write_converge(os, rows); });
        } else if (husimi->parsed()) {
            const HusimiField f = cli::cmd_husimi(cli::parse_state(a), dx, radius);
            emit(out, [&](std::ostream& os) {
                if (fmt == OutputFormat::json) os << io::canonical_dump(io::to_json(f)) << '\n';
                else io::write_csv(os, f);
            });
        }
    } catch (const Error& e) {
        std::cerr << "monge: " << e.what() << '\n';
        return e.kind() == ErrorKind::parse ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "monge: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
