#include <doctest.h>

#include <cmath>

#include "chanfront/channel2d.hpp"
#include "chanfront/errors.hpp"

using namespace chanfront;

TEST_SUITE_BEGIN("channel2d");

namespace {
double bump(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    double c = std::cos(1.5707963267948966 * x);
    return c * c;
}
double zero_f(double) { return 0.0; }
double kpp(double u) { return u * (1.0 - u); }

GeneratorParams rect_params(bool flat = false) {
    GeneratorParams p;
    p.rectangular = true;
    p.amplitude = 0.0;
    p.wing_max = 0.4;
    if (flat)
        p.width_min = p.width_max = p.width_base = 1.0;
    else {
        p.width_min = 0.8;
        p.width_max = 1.2;
    }
    return p;
}
} // namespace

TEST_CASE("rect domain: masks, walls, lattice constraints") {
    auto s = sample_channel(rect_params(), 41, 6);
    auto g = build_graph(s);
    RectDomain d = build_rect_domain(g, s, -4.0, 4.0, 0.05, 0.05);
    CHECK(d.n_inside > 0);
    int walls = 0;
    for (auto w : d.wall_up) walls += w;
    CHECK(walls > 0); // wings are separated from the spine by internal walls
    CHECK_THROWS_AS(build_rect_domain(g, s, -4.0, 4.0, 0.05, 0.03), domain_error);
    auto strig = sample_channel(GeneratorParams{}, 3, 3);
    CHECK_THROWS_AS(build_rect_domain(build_graph(strig), strig, -1.0, 1.0, 0.05, 0.05),
                    domain_error);
}

TEST_CASE("flat rectangle: z-independence is exact and matches the 1D solve") {
    auto s = sample_channel(rect_params(true), 40, 5);
    auto g = build_graph(s);
    EpsSolution es = solve_2d(g, s, 0.35, nullptr, bump, kpp, 0.8, -4.0, 4.0, 0.05, 0.05, 0.4);
    const RectDomain& d = es.dom;
    double spread = 0.0;
    for (int i = 0; i < d.nx; ++i) {
        double lo = 1e300, hi = -1e300;
        for (int k = 0; k < d.nz; ++k)
            if (d.inside[d.idx(i, k)]) {
                lo = std::min(lo, es.states.back()[d.idx(i, k)]);
                hi = std::max(hi, es.states.back()[d.idx(i, k)]);
            }
        spread = std::max(spread, hi - lo);
    }
    CHECK(spread < 1e-12);
    PdeSolution ref = solve(g, bump, kpp, 0.8, 0.05, 0.4);
    GraphComparison cmp = compare_graph(es, ref);
    CHECK(cmp.overall < 1e-3);
}

TEST_CASE("mass conservation with reflecting boundaries, f = 0") {
    auto s = sample_channel(rect_params(), 41, 5);
    auto g = build_graph(s);
    EpsSolution es = solve_2d(g, s, 0.3, nullptr, bump, zero_f, 0.6, -4.0, 4.0, 0.05, 0.05, 0.3);
    const RectDomain& d = es.dom;
    auto mass = [&](const std::vector<double>& u) {
        double m = 0;
        for (std::size_t i = 0; i < u.size(); ++i)
            if (d.inside[i]) m += u[i];
        return m * d.dx * d.dz;
    };
    double m0 = mass(es.states.front());
    CHECK(std::abs(mass(es.states.back()) - m0) < 1e-8 * m0);
}

TEST_CASE("winged shape: sup error vs the graph decreases with eps") {
    auto s = sample_channel(rect_params(), 42, 6);
    auto g = build_graph(s);
    PdeSolution ref = solve(g, bump, kpp, 0.9, 0.05, 0.3);
    std::vector<double> errs;
    for (double eps : {0.45, 0.22}) {
        EpsSolution es = solve_2d(g, s, eps, nullptr, bump, kpp, 0.9, -4.0, 4.0, 0.05, 0.05, 0.3);
        errs.push_back(compare_graph(es, ref).overall);
    }
    CHECK(errs[1] < errs[0]);

    // The same trend with the reaction switched off isolates the averaging.
    PdeSolution ref0 = solve(g, bump, zero_f, 0.9, 0.05, 0.3);
    std::vector<double> errs0;
    for (double eps : {0.45, 0.22}) {
        EpsSolution es = solve_2d(g, s, eps, nullptr, bump, zero_f, 0.9, -4.0, 4.0, 0.05, 0.05, 0.3);
        errs0.push_back(compare_graph(es, ref0).overall);
    }
    CHECK(errs0[1] < errs0[0]);
}

TEST_CASE("zero-mean shear keeps the solution bounded and the domain coupled") {
    auto s = sample_channel(rect_params(), 41, 5);
    auto g = build_graph(s);
    auto V = [&](double, double z) { return 0.4 * (z - 0.5); };
    EpsSolution es = solve_2d(g, s, 0.3, V, bump, kpp, 0.5, -4.0, 4.0, 0.05, 0.05, 0.25);
    for (std::size_t i = 0; i < es.states.back().size(); ++i)
        if (es.dom.inside[i]) {
            CHECK(es.states.back()[i] > -1e-12);
            CHECK(es.states.back()[i] < 1.0 + 1e-12);
        }
}

TEST_CASE("cross-section oscillation shrinks after the initial transient") {
    auto s = sample_channel(rect_params(), 42, 6);
    auto g = build_graph(s);
    EpsSolution es = solve_2d(g, s, 0.2, nullptr, bump, kpp, 1.2, -4.0, 4.0, 0.05, 0.05, 0.3);
    double late = 0.0;
    for (std::size_t si = 0; si < es.times.size(); ++si)
        if (es.times[si] >= 1.0) late = std::max(late, cross_section_oscillation(es, si));
    CHECK(late < 0.05);
}

TEST_SUITE_END();
