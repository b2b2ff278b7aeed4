#include <doctest.h>

#include <cmath>
#include <limits>

#include "chanfront/acceptance.hpp"
#include "chanfront/errors.hpp"
#include "chanfront/rng.hpp"
#include "chanfront/sturm.hpp"

using namespace chanfront;

TEST_SUITE_BEGIN("sturm");

TEST_CASE("fundamental solution, lambda = 0: u = 1, Dp u = 0") {
    auto prof = WidthProfile::trig(1.0, {{0.2, 3.0, 0.4}}, 1.2);
    for (auto m : {SolveMethod::series, SolveMethod::ode}) {
        FundamentalSolution f(prof, 0.0, m);
        CHECK(f.value(0.7) == 1.0);
        CHECK(f.dp(0.7) == 0.0);
        CHECK(f.scale_integral() == doctest::Approx(prof.scale_p(1.2)).epsilon(1e-12));
    }
}

TEST_CASE("constant width: u = cosh(sqrt(2 lambda) x)") {
    auto prof = WidthProfile::constant(1.0, 1.0);
    for (auto m : {SolveMethod::series, SolveMethod::ode}) {
        FundamentalSolution f(prof, 0.5, m);
        CHECK(f.value(1.0) == doctest::Approx(std::cosh(1.0)).epsilon(1e-9));
        CHECK(f.dp(1.0) == doctest::Approx(std::sinh(1.0)).epsilon(1e-9));
        CHECK(f.value(0.37) == doctest::Approx(std::cosh(0.37)).epsilon(1e-9));
    }
    // Width rescaling leaves the equation invariant.
    FundamentalSolution f2(WidthProfile::constant(3.7, 1.0), 0.5, SolveMethod::ode);
    CHECK(f2.value(1.0) == doctest::Approx(std::cosh(1.0)).epsilon(1e-9));
}

TEST_CASE("exponential width: closed form from the characteristic roots") {
    // l = e^{2x}: (1/2)u'' + u' = lambda u; at lambda = 1.5 the decaying and
    // growing roots are -3 and 1, so u = (3 e^x + e^{-3x})/4.
    auto prof = WidthProfile::exp_width(1.0, 2.0, 1.0);
    for (auto m : {SolveMethod::series, SolveMethod::ode}) {
        FundamentalSolution f(prof, 1.5, m);
        double expect = (3.0 * std::exp(1.0) + std::exp(-3.0)) / 4.0;
        CHECK(f.value(1.0) == doctest::Approx(expect).epsilon(1e-9));
        double dexpect = (3.0 * std::exp(1.0) - 3.0 * std::exp(-3.0)) / 4.0; // du/dx at 1
        CHECK(f.deriv(1.0) == doctest::Approx(dexpect).epsilon(1e-8));
    }
}

TEST_CASE("series and ode methods agree on random edges") {
    RngStream rng = substream(2024, 0xABCD, 0);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        double lam = rng.uniform(-2.0, 0.5);
        int kind = static_cast<int>(rng.index(3));
        WidthProfile prof = WidthProfile::constant(1.0, 1.0);
        if (kind == 0)
            prof = WidthProfile::constant(rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5));
        else if (kind == 1)
            prof = WidthProfile::trig(1.0, {{rng.uniform(-0.2, 0.2), rng.uniform(2.0, 6.0),
                                             rng.uniform(0.0, 6.28)}},
                                      rng.uniform(0.5, 1.5));
        else
            prof = WidthProfile::tip_power(rng.uniform(0.05, 0.4), rng.uniform(0.25, 0.75),
                                           rng.uniform(0.1, 0.5));
        FundamentalSolution fs(prof, lam, SolveMethod::series);
        FundamentalSolution fo(prof, lam, SolveMethod::ode);
        double scale = std::max(1.0, std::abs(fo.end_value()));
        CHECK(std::abs(fs.end_value() - fo.end_value()) / scale < 1e-8);
        CHECK(std::abs(fs.end_dp() - fo.end_dp()) / std::max(1.0, std::abs(fo.end_dp())) < 1e-8);
        // The scale integral of u^-2 is only meaningful while u stays away
        // from zero (production only uses it at lam >= 0).
        double umin = 1e300;
        for (int i = 0; i <= 16; ++i) umin = std::min(umin, fo.value(prof.length() * i / 16.0));
        if (umin > 0.2)
            CHECK(std::abs(fs.scale_integral() - fo.scale_integral()) /
                      std::abs(fo.scale_integral()) <
                  1e-7);
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("residual of the generalized ODE on a check grid") {
    auto prof = WidthProfile::trig(1.0, {{0.25, 4.0, 1.1}}, 1.3);
    FundamentalSolution f(prof, 1.2, SolveMethod::ode);
    // D_m D_p u = lambda u, checked with central differences in x.
    double h = 1e-3;
    for (double x : {0.2, 0.5, 0.9, 1.1}) {
        double dp_plus = prof.width(x + h / 2) * (f.value(x + h) - f.value(x)) / h;
        double dp_minus = prof.width(x - h / 2) * (f.value(x) - f.value(x - h)) / h;
        double dm = prof.speed_m(x + h / 2) - prof.speed_m(x - h / 2);
        double resid = (dp_plus - dp_minus) / dm - 1.2 * f.value(x);
        CHECK(std::abs(resid) < 2e-4 * std::max(1.0, f.value(x)));
    }
}

TEST_CASE("series divergence advises the ode fallback") {
    // Large |lambda| on a long edge: alternating series loses all digits.
    auto prof = WidthProfile::constant(1.0, 30.0);
    CHECK_THROWS_AS(FundamentalSolution(prof, -40.0, SolveMethod::series), method_error);
}

TEST_CASE("basic pair: constant width closed forms and endpoint identities") {
    auto prof = WidthProfile::constant(1.0, 1.0);
    FundamentalSolution f(prof, 0.5, SolveMethod::ode);
    BasicPair bp = basic_pair(f);
    CHECK(bp.value_plus(f, 0.5) == doctest::Approx(std::sinh(0.5) / std::sinh(1.0)).epsilon(1e-8));
    CHECK(std::abs(bp.value_plus(f, 0.0)) < 1e-12);
    CHECK(bp.value_plus(f, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(bp.value_minus(f, 0.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(bp.value_minus(f, 1.0)) < 1e-9);
    // d/dx of sinh(x)/sinh(1) at the endpoints.
    CHECK(bp.du_plus_0 == doctest::Approx(1.0 / std::sinh(1.0)).epsilon(1e-9));
    CHECK(bp.du_plus_R == doctest::Approx(std::cosh(1.0) / std::sinh(1.0)).epsilon(1e-9));
    // u_plus increasing, u_minus decreasing on a grid.
    double prev = -1;
    for (int i = 0; i <= 10; ++i) {
        double v = bp.value_plus(f, i / 10.0);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("basic pair at lambda 0 reduces to the scale function") {
    auto prof = WidthProfile::trig(1.0, {{0.2, 3.0, 0.4}}, 1.2);
    FundamentalSolution f(prof, 0.0, SolveMethod::ode);
    BasicPair bp = basic_pair(f);
    for (double x : {0.2, 0.6, 1.0}) {
        CHECK(bp.value_plus(f, x) == doctest::Approx(prof.scale_p(x) / prof.scale_p(1.2)).epsilon(1e-9));
        CHECK(bp.value_plus(f, x) + bp.value_minus(f, x) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("cell matrix: lambda = 0 gives the rho = 1 fixed point") {
    auto shape = sample_channel(GeneratorParams{}, 3, 4);
    TransferCell t = cell_matrix(shape.pos[0], shape.pos[1], 0.0);
    CHECK(t.x_k == doctest::Approx(-t.S_spine / t.S_next).epsilon(1e-12));
    CHECK(t.y_k == doctest::Approx(1.0 + t.S_spine / t.S_next).epsilon(1e-12));
    CHECK(1.0 / (t.x_k * 1.0 + t.y_k) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cell matrix: vanishing wing reduces to the two-edge junction") {
    auto tiny = flat_channel(3, 1.0, 1.0, 1e-8);
    auto none = flat_channel(3, 1.0, 1.0, 0.0);
    TransferCell a = cell_matrix(tiny.pos[0], tiny.pos[1], -0.8);
    TransferCell b = cell_matrix(none.pos[0], none.pos[1], -0.8);
    CHECK(a.y_k == doctest::Approx(b.y_k).epsilon(1e-6));
    CHECK(a.x_k == doctest::Approx(b.x_k).epsilon(1e-6));
    CHECK(a.S_wing > 1e6); // the vanishing wing has a huge scale integral
}

TEST_CASE("cell matrix rejects positive exponents and inconsistent data") {
    auto shape = sample_channel(GeneratorParams{}, 3, 3);
    CHECK_THROWS_AS(cell_matrix(shape.pos[0], shape.pos[1], 0.5), domain_error);
    EdgeData sp = solve_edge(shape.pos[0].spine, 0.8, SolveMethod::ode);
    EdgeData nx = solve_edge(shape.pos[1].spine, 0.8, SolveMethod::ode);
    EdgeData wd = solve_edge(shape.pos[0].wing_profile(), 0.8, SolveMethod::ode,
                             shape.pos[0].wing_r < 0);
    // A negative scale integral flips the sign bound on x_k.
    EdgeData broken = nx;
    broken.S = -broken.S;
    CHECK_THROWS_AS(cell_matrix(shape.pos[0], sp, broken, &wd, -0.8), consistency_error);
    EdgeData nan_data = nx;
    nan_data.S = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(cell_matrix(shape.pos[0], sp, nan_data, &wd, -0.8), consistency_error);
}

TEST_CASE("hitting transform: flat channel Brownian Laplace transform") {
    auto flat = flat_channel(64);
    DepthPolicy pol;
    pol.report = 1;
    TransformResult t = hitting_transform(flat, -0.5, Direction::plus, pol);
    // distance 1, lambda -0.5: e^{-sqrt(-2 lambda)} = e^{-1}
    CHECK(t.rho[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
    pol.report = 3;
    TransformResult t3 = hitting_transform(flat, -0.5, Direction::plus, pol);
    CHECK(t3.log_sum == doctest::Approx(-3.0).epsilon(1e-9));
}

TEST_CASE("hitting transform: lambda 0 certainty and monotonicity in lambda") {
    auto shape = sample_channel(GeneratorParams{}, 19, 40);
    DepthPolicy pol;
    pol.report = 20;
    TransformResult t0 = hitting_transform(shape, 0.0, Direction::plus, pol);
    for (double r : t0.rho) CHECK(r == 1.0);
    TransformResult ta = hitting_transform(shape, -1.0, Direction::plus, pol);
    TransformResult tb = hitting_transform(shape, -0.3, Direction::plus, pol);
    for (int k = 0; k < 20; ++k) {
        CHECK(ta.rho[k] < tb.rho[k]);
        CHECK(tb.rho[k] < 1.0);
        CHECK(ta.rho[k] > 0.0);
    }
    CHECK_THROWS_AS(hitting_transform(shape, 0.1, Direction::plus, pol), domain_error);
}

TEST_CASE("stationarity of the ratio distribution (two-sample KS between halves)") {
    // Neighboring ratios share a junction and the recursion tail, so the
    // sample is thinned to every third cell before the i.i.d. KS test.
    auto shape = sample_channel(GeneratorParams{}, 77, 960);
    DepthPolicy pol;
    pol.report = 900;
    TransformResult t = hitting_transform(shape, -1.0, Direction::plus, pol);
    std::vector<double> a, b;
    for (int k = 0; k < 900; k += 3) (k < 450 ? a : b).push_back(t.rho[k]);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double ks = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        ks = std::max(ks, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    double n = static_cast<double>(a.size());
    double crit = 1.628 * std::sqrt(2.0 / n); // 1% level
    CHECK(ks < crit);
}

TEST_CASE("dense junction-system oracle at small depth") {
    auto shape = sample_channel(GeneratorParams{}, 13, 8);
    double lam = -0.7;
    accept::DenseSolution d = accept::dense_junction_solve(shape.pos, 4, lam);
    CHECK(d.c_minus[0] == doctest::Approx(1.0).epsilon(1e-12));
    // Ratios against cell_matrix recursion at the same truncation depth.
    std::vector<TransferCell> tc;
    for (int k = 0; k < 4; ++k) tc.push_back(cell_matrix(shape.pos[k], shape.pos[k + 1], lam));
    double r = 0.0;
    std::vector<double> rho(4);
    for (int k = 3; k >= 0; --k) {
        r = 1.0 / (tc[k].x_k * r + tc[k].y_k);
        rho[k] = r;
    }
    for (int k = 0; k < 4; ++k)
        CHECK(rho[k] == doctest::Approx(d.c_plus[k] / d.c_minus[k]).epsilon(1e-9));
}

TEST_CASE("hit probability: formula values and boundaries") {
    auto flat = flat_channel(64);
    CHECK(hit_probability(flat, 3.0, 10.0) == doctest::Approx(0.3).epsilon(1e-12));
    // The complementary hit-0-first probability is 0.7.
    CHECK(1.0 - hit_probability(flat, 3.0, 10.0) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(hit_probability(flat, 1e-9, 10.0) < 1e-9);
    CHECK_THROWS_AS(hit_probability(flat, -1.0, 10.0), domain_error);
    CHECK_THROWS_AS(hit_probability(flat, 11.0, 10.0), domain_error);

    // Symmetric profile about A/2 gives exactly 1/2.
    ChannelShape sym = flat_channel(4, 1.0, 2.0);
    double L = 2.0, om = 4.0;
    auto prof = WidthProfile::trig(1.0, {{0.15, om, -om * L / 2.0}}, L);
    for (auto* side : {&sym.pos, &sym.neg})
        for (auto& c : *side) {
            c.spine = prof;
            c.spine_length = L;
            c.alpha = prof.width(L);
            c.beta = prof.width(0.0);
            c.gamma = std::abs(c.alpha - c.beta);
            c.wing_scale = c.gamma;
        }
    CHECK(hit_probability(sym, 1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("expected exit time: classical value, boundary, unbounded growth") {
    auto flat = flat_channel(1050);
    CHECK(expected_exit_time(flat, 1.0, 10.0) == doctest::Approx(9.0).epsilon(1e-10));
    CHECK(expected_exit_time(flat, 1e-8, 10.0) < 1e-6);
    double v10 = expected_exit_time(flat, 1.0, 10.0);
    double v100 = expected_exit_time(flat, 1.0, 100.0);
    double v1000 = expected_exit_time(flat, 1.0, 1000.0);
    CHECK(v100 == doctest::Approx(99.0).epsilon(1e-8));
    CHECK(v1000 == doctest::Approx(999.0).epsilon(1e-7));
    CHECK(v100 > 5 * v10);
    CHECK(v1000 > 5 * v100);
}

TEST_CASE("transform depth errors on too-short shapes") {
    auto shape = sample_channel(GeneratorParams{}, 3, 6);
    DepthPolicy pol;
    pol.report = 10;
    CHECK_THROWS_AS(hitting_transform(shape, -0.5, Direction::plus, pol), domain_error);
    // A near-zero exponent cannot converge at tiny depth.
    DepthPolicy pol2;
    pol2.report = 5;
    CHECK_THROWS_AS(hitting_transform(shape, -1e-7, Direction::plus, pol2), truncation_error);
}

TEST_SUITE_END();
