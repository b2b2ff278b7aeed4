#include <doctest.h>

#include <cmath>

#include "chanfront/errors.hpp"
#include "chanfront/frontpde.hpp"
#include "chanfront/quad.hpp"

using namespace chanfront;

TEST_SUITE_BEGIN("frontpde");

namespace {
double bump(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    double c = std::cos(1.5707963267948966 * x);
    return c * c;
}
double zero_f(double) { return 0.0; }
double kpp(double u) { return u * (1.0 - u); }
} // namespace

TEST_CASE("grid: shared vertex nodes, positive masses, shortest edge resolved") {
    auto g = build_graph(sample_channel(GeneratorParams{}, 3, 4));
    GraphGrid grid = build_grid(g, 0.1);
    for (const auto& n : grid.nodes) CHECK(n.mass > 0.0);
    for (const auto& e : g.edges) {
        const auto& chain = grid.edge_nodes[e.id];
        CHECK(static_cast<int>(chain.size()) >= 10); // >= 8 interior nodes
        CHECK(chain.front() == grid.vertex_node(e.v0));
        CHECK(chain.back() == grid.vertex_node(e.v1));
    }
}

TEST_CASE("mass conservation for pure diffusion on a winged graph") {
    auto g = build_graph(sample_channel(GeneratorParams{}, 7, 5));
    PdeSolution sol = solve(g, bump, zero_f, 2.0, 0.1, 0.5);
    auto mass = [&](const std::vector<double>& u) {
        double m = 0;
        for (std::size_t i = 0; i < u.size(); ++i) m += u[i] * sol.grid.nodes[i].mass;
        return m;
    };
    double m0 = mass(sol.states.front());
    for (const auto& st : sol.states) CHECK(std::abs(mass(st) - m0) < 1e-10 * m0);
}

TEST_CASE("u = 1 is an equilibrium of the KPP dynamics") {
    auto g = build_graph(flat_channel(6));
    PdeSolution sol = solve(g, [](double) { return 1.0; }, kpp, 1.0, 0.1, 0.5);
    for (double v : sol.states.back()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("flat heat kernel against the Gaussian convolution") {
    auto g = build_graph(flat_channel(12));
    PdeSolution sol = solve(g, bump, zero_f, 1.0, 0.01, 1.0);
    double worst = 0.0;
    for (double x = -4.0; x <= 4.0; x += 0.25) {
        double exact = adaptive_quad(
            [&](double y) {
                return bump(y) * std::exp(-(x - y) * (x - y) / 2.0) / std::sqrt(6.283185307179586);
            },
            -1.0, 1.0, 1e-12, 1e-15);
        worst = std::max(worst, std::abs(spine_value(sol, sol.states.back(), x) - exact));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("track recovers a synthetic traveling profile speed") {
    auto g = build_graph(flat_channel(30));
    PdeSolution sol;
    sol.graph = &g;
    sol.grid = build_grid(g, 0.05);
    for (int s = 0; s <= 20; ++s) {
        double t = s * 0.5;
        sol.times.push_back(t);
        std::vector<double> u(sol.grid.nodes.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            double x = sol.grid.nodes[i].gx;
            u[i] = 1.0 / (1.0 + std::exp(2.0 * (std::abs(x) - 3.0 - 1.3 * t)));
        }
        sol.states.push_back(std::move(u));
    }
    FrontTrace tr = track(sol, 0.5, 0.4);
    CHECK(tr.speed_right == doctest::Approx(1.3).epsilon(1e-3));
    CHECK(tr.speed_left == doctest::Approx(-1.3).epsilon(1e-3));
    CHECK(tr.monotone);
    CHECK(tr.r2_right > 0.999);
}

TEST_CASE("mirror-symmetric spreading: left and right speeds agree") {
    auto g = build_graph(flat_channel(26));
    PdeSolution sol = solve(g, bump, kpp, 12.0, 0.1, 0.5);
    FrontTrace tr = track(sol, 0.5, 0.5);
    CHECK(std::abs(tr.speed_left + tr.speed_right) < 0.02 * tr.speed_right);
}

TEST_CASE("dx refinement moves the fitted speed by less than 1%") {
    auto g = build_graph(flat_channel(32));
    PdeSolution a = solve(g, bump, kpp, 18.0, 0.1, 0.25);
    PdeSolution b = solve(g, bump, kpp, 18.0, 0.05, 0.25);
    double sa = track(a, 0.5, 0.5).speed_right;
    double sb = track(b, 0.5, 0.5).speed_right;
    CHECK(std::abs(sa - sb) / sb < 0.01);
}

TEST_CASE("stability guard trips when the time step is too large") {
    auto g = build_graph(flat_channel(6));
    CHECK_THROWS_AS(solve(g, bump, kpp, 0.5, 0.1, 0.25, 3.0), stability_error);
}

TEST_CASE("track errors: missing crossings and boundary contact") {
    auto g = build_graph(flat_channel(6));
    // Front reaches the domain edge well before the end of the run.
    PdeSolution sol = solve(g, bump, kpp, 14.0, 0.1, 0.5);
    CHECK_THROWS_AS(track(sol, 0.5, 0.5), domain_exhausted_error);
}

TEST_SUITE_END();
