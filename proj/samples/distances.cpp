// Prints a few distances computed three ways.
#include <cstdio>

#include "monge/monge.hpp"

int main() {
    using namespace monge;
    const StateSpec vacuum = Coherent{};
    const StateSpec thermal = Thermal{3.0};

    std::printf("closed form  %.10f\n", closed_form(vacuum, thermal, PNorm(1.0))->value);
    std::printf("radial       %.10f\n", monge_radial(vacuum, thermal).value);

    GridParams grid;
    grid.dx = 0.25;
    const DistanceResult r = monge_numeric(Coherent{{0.0, 0.0}}, Coherent{{1.0, 0.0}}, grid);
    std::printf("transport    %.10f  (%g x %g peaks)\n", r.value, r.diagnostics.at("peaks_source"),
                r.diagnostics.at("peaks_sink"));
}
