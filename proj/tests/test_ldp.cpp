#include <doctest.h>

#include <cmath>

#include "chanfront/errors.hpp"
#include "chanfront/ldp.hpp"

using namespace chanfront;

TEST_SUITE_BEGIN("ldp");

namespace {
SpectralCurve flat_curve(int cells = 200, int pts = 200) {
    static ChannelShape flat = flat_channel(900);
    return mu_curve(flat, default_lambda_grid(pts, -10.0, -1e-3), Direction::plus, cells);
}
} // namespace

TEST_CASE("flat channel: mu = -sqrt(-2 lambda), mu(0) = 0 exactly") {
    SpectralCurve c = flat_curve();
    CHECK(c.mu.back() == 0.0);
    for (std::size_t i = 0; i + 1 < c.lambda.size(); ++i) {
        CHECK(c.mu[i] == doctest::Approx(-std::sqrt(-2.0 * c.lambda[i])).epsilon(1e-8));
        CHECK(c.se[i] < 1e-12); // identical cells
    }
}

TEST_CASE("rate: Brownian conjugate I(a) = 1/(2a), lambda* = -1/(2a^2)") {
    SpectralCurve c = flat_curve(200, 400);
    for (double a : {0.5, 1.0, 3.0}) {
        RateResult r = rate(c, a);
        CHECK(r.value == doctest::Approx(1.0 / (2.0 * a)).epsilon(2e-5));
        CHECK(r.lambda_star == doctest::Approx(-1.0 / (2.0 * a * a)).epsilon(2e-2));
        CHECK(!r.grid_limited);
    }
    // a too small: maximizer beyond the most negative grid point.
    CHECK(rate(c, 0.05).grid_limited);
    CHECK_THROWS_AS(rate(c, -1.0), domain_error);
}

TEST_CASE("rate: convexity of the conjugate and monotone maximizer") {
    SpectralCurve c = flat_curve();
    double a1 = 0.7, a2 = 1.1, a3 = 1.9;
    double I1 = rate(c, a1).value, I2 = rate(c, a2).value, I3 = rate(c, a3).value;
    double w = (a2 - a1) / (a3 - a1);
    CHECK(I2 <= (1 - w) * I1 + w * I3 + 1e-12);
    CHECK(rate(c, a1).lambda_star <= rate(c, a3).lambda_star + 1e-12);
}

TEST_CASE("speeds: sqrt(2 f'(0)) for the flat channel") {
    SpectralCurve cp = flat_curve(200, 400);
    SpectralCurve cm = cp;
    cm.dir = Direction::minus;
    FrontSpeeds s = speeds(cp, cm, 1.0);
    CHECK(s.c_plus == doctest::Approx(std::sqrt(2.0)).epsilon(1e-5));
    CHECK(s.c_minus == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-5));
    CHECK(s.residual_plus < 1e-8);
    FrontSpeeds s2 = speeds(cp, cm, 2.0);
    CHECK(s2.c_plus == doctest::Approx(2.0).epsilon(1e-5));
    CHECK_THROWS_AS(speeds(cp, cm, -1.0), domain_error);
}

TEST_CASE("mirror symmetry: mu_minus(shape) equals mu_plus(mirror(shape))") {
    auto shape = sample_channel(GeneratorParams{}, 29, 120);
    auto grid = default_lambda_grid(8, -3.0, -0.05);
    SpectralCurve a = mu_curve(shape, grid, Direction::minus, 80);
    SpectralCurve b = mu_curve(mirror(shape), grid, Direction::plus, 80);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(a.mu[i] == b.mu[i]);
}

TEST_CASE("random environment: mu below the flat bound, convex, negative") {
    auto shape = sample_channel(GeneratorParams{}, 57, 400);
    auto grid = default_lambda_grid(12, -5.0, -0.05);
    SpectralCurve c = mu_curve(shape, grid, Direction::plus, 320);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        CHECK(c.mu[i] < 0.0);
        // Wings only delay passage: mu must not beat the widest flat channel.
        CHECK(c.mu[i] <= -std::sqrt(-2.0 * grid[i]) * 0.5);
    }
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        double d1 = (c.mu[i] - c.mu[i - 1]) / (grid[i] - grid[i - 1]);
        double d2 = (c.mu[i + 1] - c.mu[i]) / (grid[i + 1] - grid[i]);
        CHECK(d2 >= d1 - 1e-8 * std::abs(c.mu.front()));
    }
}

TEST_CASE("grid validation errors") {
    auto shape = flat_channel(64);
    CHECK_THROWS_AS(mu_curve(shape, {0.5}, Direction::plus, 8), domain_error);
    CHECK_THROWS_AS(mu_curve(shape, {-1.0, -2.0}, Direction::plus, 8), domain_error);
    CHECK_THROWS_AS(default_lambda_grid(10, -1e-4, -10.0), domain_error);
}

TEST_SUITE_END();
