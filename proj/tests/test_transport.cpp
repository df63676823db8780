#include <algorithm>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "monge/analytic.hpp"
#include "monge/transport.hpp"
#include "support.hpp"

using namespace monge;

namespace {

// Minimum over all permutations; the exact optimum for N = M unit masses.
double brute_force_assignment(const TransportProblem& pb) {
    std::vector<std::size_t> perm(pb.rows());
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double c = 0.0;
        for (std::size_t i = 0; i < perm.size(); ++i) c += pb.cost(i, perm[i]);
        best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

double min_reduced_cost(const TransportProblem& pb, const TransportPlan& plan) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pb.rows(); ++i)
        for (std::size_t j = 0; j < pb.cols(); ++j) m = std::min(m, pb.cost(i, j) - plan.u[i] - plan.v[j]);
    return m;
}

TransportProblem random_problem(proptest::Gen& gen, std::size_t n, std::size_t m, double p = 1.0) {
    return TransportProblem(gen.masses(n), gen.masses(m), gen.points(n, 3.0), gen.points(m, 3.0), p);
}

} // namespace

TEST(NorthwestCorner, Examples) {
    const auto one = TransportProblem::from_costs({1.0}, {1.0}, {3.0});
    const auto p1 = northwest_corner(one);
    ASSERT_EQ(p1.basis.size(), 1u);
    EXPECT_EQ(p1.basis[0].mass, 1.0);

    const auto pb = TransportProblem::from_costs({2.0, 1.0}, {1.0, 2.0}, {1, 2, 3, 4});
    const auto plan = northwest_corner(pb);
    const auto s = plan.shipments();
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0].i, 0u);
    EXPECT_EQ(s[0].j, 0u);
    EXPECT_EQ(s[0].mass, 1.0);
    EXPECT_EQ(s[1].i, 0u);
    EXPECT_EQ(s[1].j, 1u);
    EXPECT_EQ(s[1].mass, 1.0);
    EXPECT_EQ(s[2].i, 1u);
    EXPECT_EQ(s[2].j, 1u);
    EXPECT_EQ(s[2].mass, 1.0);
}

TEST(InitialPlans, FeasibleBasicOnRandomInstances) {
    proptest::Gen gen(3);
    for (int k = 0; k < 100; ++k) {
        const auto pb = random_problem(gen, gen.index(1, 12), gen.index(1, 12));
        for (const auto& plan : {northwest_corner(pb), vogel(pb)}) {
            EXPECT_EQ(plan.basis.size(), pb.rows() + pb.cols() - 1);
            EXPECT_LE(marginal_error(pb, plan), 1e-12);
            for (const auto& s : plan.basis) EXPECT_GE(s.mass, 0.0);
        }
    }
}

TEST(Vogel, SingleRowOrColumnIsForced) {
    const auto row = TransportProblem::from_costs({1.0}, {0.2, 0.3, 0.5}, {5, 1, 3});
    const auto col = TransportProblem::from_costs({0.2, 0.3, 0.5}, {1.0}, {5, 1, 3});
    EXPECT_DOUBLE_EQ(vogel(row).total_cost, northwest_corner(row).total_cost);
    EXPECT_DOUBLE_EQ(vogel(col).total_cost, northwest_corner(col).total_cost);
}

TEST(Vogel, IdenticalPointSetsGiveDiagonal) {
    proptest::Gen gen(4);
    const auto pts = gen.points(6, 2.0);
    const auto w = gen.masses(6);
    const TransportProblem pb(w, w, pts, pts);
    EXPECT_EQ(vogel(pb).total_cost, 0.0);
    EXPECT_EQ(optimize(pb, northwest_corner(pb)).total_cost, 0.0);
}

TEST(Vogel, UsuallyBeatsNorthwest) {
    proptest::Gen gen(5);
    int better = 0;
    for (int k = 0; k < 50; ++k) {
        const auto pb = random_problem(gen, 3, 3);
        better += vogel(pb).total_cost <= northwest_corner(pb).total_cost + 1e-15;
    }
    EXPECT_GE(better, 40);
}

TEST(Optimize, OneByOneUnchanged) {
    const auto pb = TransportProblem::from_costs({1.0}, {1.0}, {2.5});
    const auto plan = optimize(pb, northwest_corner(pb));
    EXPECT_TRUE(plan.optimal);
    EXPECT_EQ(plan.total_cost, 2.5);
    EXPECT_EQ(plan.iterations, 0u);
}

TEST(Optimize, MatchesPermutationOracleOnIntegerCosts) {
    proptest::Gen gen(6);
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = gen.index(1, 4);
        std::vector<double> costs(n * n);
        for (double& c : costs) c = static_cast<double>(gen.index(0, 20)); // many ties: degenerate pivots
        const auto pb = TransportProblem::from_costs(std::vector<double>(n, 1.0), std::vector<double>(n, 1.0), costs);
        const double best = brute_force_assignment(pb);
        EXPECT_EQ(optimize(pb, northwest_corner(pb)).total_cost, best);
        EXPECT_EQ(optimize(pb, vogel(pb)).total_cost, best);
    }
}

TEST(Optimize, MatchesPermutationOracleOnPoints) {
    proptest::Gen gen(7);
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = gen.index(2, 4);
        const std::vector<double> w(n, 1.0 / n);
        for (double p : {1.0, 2.0}) {
            const TransportProblem pb(w, w, gen.points(n, 2.0), gen.points(n, 2.0), p);
            EXPECT_NEAR(optimize(pb, vogel(pb)).total_cost, brute_force_assignment(pb) / n, 1e-13);
        }
    }
}

TEST(Optimize, CertificateOnRandomInstances) {
    proptest::Gen gen(8);
    for (int k = 0; k < 60; ++k) {
        const auto pb = random_problem(gen, gen.index(1, 25), gen.index(1, 25), k % 2 ? 2.0 : 1.0);
        const auto nw = optimize(pb, northwest_corner(pb));
        const auto vg = optimize(pb, vogel(pb));
        ASSERT_TRUE(nw.optimal && vg.optimal);
        EXPECT_NEAR(nw.total_cost, vg.total_cost, 1e-12);
        EXPECT_LE(vg.total_cost, vogel(pb).total_cost + 1e-12);
        EXPECT_GE(min_reduced_cost(pb, nw), -1e-9);
        EXPECT_LE(marginal_error(pb, nw), 1e-12);
        for (const auto& s : nw.basis) EXPECT_NEAR(pb.cost(s.i, s.j), nw.u[s.i] + nw.v[s.j], 1e-12);
    }
}

TEST(Optimize, AllPricingRulesAgree) {
    proptest::Gen gen(9);
    for (int k = 0; k < 20; ++k) {
        const auto pb = random_problem(gen, 15, 18);
        const double ref = optimize(pb, northwest_corner(pb), {.pricing = Pricing::dantzig}).total_cost;
        for (Pricing rule : {Pricing::block_search, Pricing::bland, Pricing::automatic})
            EXPECT_NEAR(optimize(pb, northwest_corner(pb), {.pricing = rule}).total_cost, ref, 1e-12);
    }
}

TEST(Optimize, HighlyDegenerateInstances) {
    // Equal masses on a lattice with integer costs: every pivot ties.
    const std::size_t n = 12;
    std::vector<double> costs(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) costs[i * n + j] = static_cast<double>((i * 7 + j * 3) % 5);
    const auto pb = TransportProblem::from_costs(std::vector<double>(n, 1.0), std::vector<double>(n, 1.0), costs);
    for (Pricing rule : {Pricing::dantzig, Pricing::bland, Pricing::block_search}) {
        const auto plan = optimize(pb, northwest_corner(pb), {.pricing = rule});
        EXPECT_TRUE(plan.optimal);
        EXPECT_GE(min_reduced_cost(pb, plan), -1e-9);
    }
}

TEST(Optimize, HeuristicStartsArePerturbationFeasible) {
    proptest::Gen gen(12);
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = gen.index(1, 10), m = gen.index(1, 10);
        std::vector<double> costs(n * m);
        for (double& c : costs) c = static_cast<double>(gen.index(0, 3));
        // Integer masses with equal totals produce many real ties.
        std::vector<double> a(n, static_cast<double>(m)), b(m, static_cast<double>(n));
        const auto pb = TransportProblem::from_costs(a, b, costs);
        EXPECT_TRUE(optimize(pb, northwest_corner(pb)).lexicographic);
        EXPECT_TRUE(optimize(pb, vogel(pb)).lexicographic);
    }
}

TEST(Optimize, IdenticalPointSetsSolveQuickly) {
    // Zero-cost start with a fully degenerate basis: needs the lexicographic rule.
    GridParams g;
    g.dx = 0.3;
    const auto r = monge_numeric(Fock{2}, Fock{2}, g);
    EXPECT_EQ(r.value, 0.0);
    EXPECT_LT(r.diagnostics.at("iterations"), 5000.0);
}

TEST(Optimize, IterationCapReportsNonOptimal) {
    proptest::Gen gen(10);
    const auto pb = random_problem(gen, 20, 20);
    const auto plan = optimize(pb, northwest_corner(pb), {.max_iterations = 2});
    EXPECT_FALSE(plan.optimal);
    EXPECT_LE(marginal_error(pb, plan), 1e-12);
}

TEST(Optimize, RejectsInvalidStart) {
    const auto pb = TransportProblem::from_costs({0.5, 0.5}, {0.5, 0.5}, {0, 1, 1, 0});
    TransportPlan bad;
    bad.basis = {{0, 0, 0.5}, {1, 1, 0.5}};
    EXPECT_THROW(optimize(pb, bad), Error);
}

TEST(TransportProblem, MassChecks) {
    EXPECT_THROW(TransportProblem::from_costs({1.0}, {2.0}, {0.0}), Error);
    EXPECT_THROW(TransportProblem::from_costs({1.0, -0.5}, {0.5}, {0.0, 0.0}), Error);
    EXPECT_NO_THROW(TransportProblem::from_costs({1.0}, {1.0 + 1e-12}, {0.0}));
    try {
        TransportProblem::from_costs(std::vector<double>(10, 0.1), std::vector<double>(10, 0.1),
                                     std::vector<double>(100, 0.0), 99);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::capacity);
    }
}

TEST(Discretize, Cases) {
    const auto g = GridLayout::square({0.0, 0.0}, 6.0, 64);
    const HusimiField f = husimi_grid(Coherent{}, g);
    const Peaks all = discretize(f, 0.0);
    EXPECT_EQ(all.points.size(), 4096u);
    EXPECT_NEAR(std::accumulate(all.masses.begin(), all.masses.end(), 0.0), 1.0, 1e-14);

    const double top = *std::max_element(f.values.begin(), f.values.end()) * g.cell_area();
    EXPECT_THROW(discretize(f, top), Error);

    const double thr = 1e-12 * top;
    const Peaks cut = discretize(f, thr);
    std::size_t expected = 0;
    for (double v : f.values) expected += v * g.cell_area() > thr;
    EXPECT_EQ(cut.points.size(), expected);
    EXPECT_LT(cut.points.size(), 4096u);
    EXPECT_NEAR(std::accumulate(cut.masses.begin(), cut.masses.end(), 0.0), 1.0, 1e-14);
}

TEST(MongeNumeric, CoherentPairOnSmallGrid) {
    GridParams g;
    g.cells = 48;
    const auto r = monge_numeric(Coherent{}, Coherent{{1.0, 0.0}}, g);
    EXPECT_NEAR(r.value, 1.0, 0.02);
    EXPECT_EQ(r.method, Method::transport);
    EXPECT_LE(r.diagnostics.at("max_reduced_cost_violation"), 1e-9);
}

TEST(MongeNumeric, IdenticalStatesGiveZero) {
    GridParams g;
    g.dx = 0.3;
    for (const StateSpec s : {StateSpec{Fock{2}}, StateSpec{Squeezed{0.5, 0.2, {0.3, 0.0}}}})
        EXPECT_NEAR(monge_numeric(s, s, g).value, 0.0, 1e-9);
}

TEST(MongeNumeric, FockVacuumThermalOn64Grid) {
    GridParams g;
    g.cells = 64;
    EXPECT_NEAR(monge_numeric(Fock{0}, Thermal{3.0}, g).value / dist_thermal(0.0, 3.0).value, 1.0, 0.02);
}

TEST(MongeNumeric, Symmetric) {
    GridParams g;
    g.dx = 0.4;
    const StateSpec a = Fock{1}, b = Squeezed{0.7, 0.4, {0.5, -0.25}};
    EXPECT_NEAR(monge_numeric(a, b, g).value, monge_numeric(b, a, g).value, 1e-9);
}

TEST(MongeNumeric, RejectsInfiniteP) {
    EXPECT_THROW(monge_numeric(Coherent{}, Fock{1}, {}, std::numeric_limits<double>::infinity()), Error);
}

TEST(MongeNumeric, CapacityRefusal) {
    GridParams g;
    g.dx = 0.05;
    try {
        monge_numeric(Coherent{}, Coherent{{1.0, 0.0}}, g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::capacity);
    }
}
