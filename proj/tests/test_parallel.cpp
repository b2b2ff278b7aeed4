#include <doctest.h>

#include <cmath>

#include "chanfront/channel2d.hpp"
#include "chanfront/frontpde.hpp"
#include "chanfront/ldp.hpp"
#include "chanfront/parallel.hpp"

using namespace chanfront;

TEST_SUITE_BEGIN("parallel");

namespace {
double bump(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    double c = std::cos(1.5707963267948966 * x);
    return c * c;
}
double kpp(double u) { return u * (1.0 - u); }
} // namespace

TEST_CASE("fixed-order pairwise sum is independent of chunking") {
    std::vector<double> v(1537);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.1 * i) * 1e-3 + 1e8 * (i % 7 == 0);
    double a = par::fixed_order_sum(v);
    double b = par::fixed_order_sum(v);
    CHECK(a == b);
}

TEST_CASE("transfer kernel: serial and parallel results are bitwise equal") {
    auto shape = sample_channel(GeneratorParams{}, 3, 260);
    DepthPolicy pol;
    pol.report = 200;
    auto s = hitting_transform(shape, -0.8, Direction::plus, pol, SolveMethod::ode,
                               par::Exec::serial);
    auto p = hitting_transform(shape, -0.8, Direction::plus, pol, SolveMethod::ode,
                               par::Exec::parallel);
    CHECK(s.log_sum == p.log_sum);
    CHECK(s.rho == p.rho);
}

TEST_CASE("graph pde kernel: serial and parallel states are bitwise equal") {
    // Above the solver's serial-fallback grain so the team really runs.
    auto g = build_graph(flat_channel(48));
    auto s = solve(g, bump, kpp, 0.1, 0.005, 0.1, 0.5, par::Exec::serial);
    auto p = solve(g, bump, kpp, 0.1, 0.005, 0.1, 0.5, par::Exec::parallel);
    CHECK(s.states.back() == p.states.back());
}

TEST_CASE("2d kernel: serial and parallel states are bitwise equal") {
    GeneratorParams rp;
    rp.rectangular = true;
    rp.amplitude = 0.0;
    rp.width_min = 0.8;
    rp.width_max = 1.2;
    rp.wing_max = 0.4;
    auto shape = sample_channel(rp, 41, 4);
    auto g = build_graph(shape);
    auto s = solve_2d(g, shape, 0.3, nullptr, bump, kpp, 0.02, -3.0, 3.0, 0.0125, 0.0125,
                      0.02, par::Exec::serial);
    auto p = solve_2d(g, shape, 0.3, nullptr, bump, kpp, 0.02, -3.0, 3.0, 0.0125, 0.0125,
                      0.02, par::Exec::parallel);
    CHECK(s.states.back() == p.states.back());
}

TEST_CASE("thread cap setter") {
    int before = par::max_threads();
    par::set_max_threads(1);
    CHECK(par::max_threads() == 1);
    par::set_max_threads(0);
    CHECK(par::max_threads() == before);
}

TEST_SUITE_END();
