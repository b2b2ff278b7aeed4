#include <doctest.h>

#include <cmath>

#include "chanfront/errors.hpp"
#include "chanfront/profile.hpp"
#include "chanfront/quad.hpp"

using namespace chanfront;

TEST_SUITE_BEGIN("profile");

TEST_CASE("constant profile measures") {
    auto p = WidthProfile::constant(2.0, 1.0);
    CHECK(p.scale_p(1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p.speed_m(1.0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(p.x_of_p(0.25) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("exponential width closed forms") {
    // l(x) = e^{2x}: p(1) = (1 - e^{-2})/2, m(1) = e^2 - 1.
    auto p = WidthProfile::exp_width(1.0, 2.0, 1.0);
    CHECK(p.scale_p(1.0) == doctest::Approx((1.0 - std::exp(-2.0)) / 2.0).epsilon(1e-12));
    CHECK(p.speed_m(1.0) == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-12));
    CHECK(p.x_of_p(p.scale_p(0.37)) == doctest::Approx(0.37).epsilon(1e-11));
}

TEST_CASE("trig profile: quadrature against dense Simpson and closed-form m") {
    auto p = WidthProfile::trig(1.0, {{0.2, 3.0, 0.7}, {0.1, 5.0, 2.1}}, 1.3);
    double direct = adaptive_quad([&](double y) { return 1.0 / p.width(y); }, 0.0, 1.1);
    CHECK(p.scale_p(1.1) == doctest::Approx(direct).epsilon(1e-10));
    double m_closed = 2.0 * (1.0 * 1.1 + 0.2 / 3.0 * (std::sin(3.0 * 1.1 + 0.7) - std::sin(0.7)) +
                             0.1 / 5.0 * (std::sin(5.0 * 1.1 + 2.1) - std::sin(2.1)));
    CHECK(p.speed_m(1.1) == doctest::Approx(m_closed).epsilon(1e-13));
    CHECK(p.x_of_p(p.scale_p(0.9)) == doctest::Approx(0.9).epsilon(1e-10));
}

TEST_CASE("tip-power profile: closed forms and finite scale integral") {
    double gamma = 0.3, beta = 0.5, R = 0.4;
    auto p = WidthProfile::tip_power(gamma, beta, R);
    // p(x) = R/(gamma(1-beta)) (1 - (1-x/R)^{1-beta})
    double x = 0.39;
    double pref = R / (gamma * (1.0 - beta));
    CHECK(p.scale_p(x) == doctest::Approx(pref * (1.0 - std::pow(1.0 - x / R, 1.0 - beta)))
                              .epsilon(1e-13));
    CHECK(p.speed_m(R) == doctest::Approx(2.0 * gamma * R / (1.0 + beta)).epsilon(1e-13));
    CHECK(std::isfinite(p.scale_p(R)));
    // Near the tip the remaining scale integral behaves like (R-x)^{1-beta}.
    double r1 = (p.scale_p(R) - p.scale_p(R - 1e-3)) / std::pow(1e-3, 1.0 - beta);
    double r2 = (p.scale_p(R) - p.scale_p(R - 1e-5)) / std::pow(1e-5, 1.0 - beta);
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-6));
    CHECK(p.x_of_p(p.scale_p(0.25)) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("strict monotonicity of p and m") {
    auto p = WidthProfile::trig(1.0, {{0.25, 4.0, 0.3}}, 1.4);
    double prev_p = -1, prev_m = -1;
    for (int i = 0; i <= 200; ++i) {
        double x = 1.4 * i / 200;
        CHECK(p.scale_p(x) > prev_p);
        CHECK(p.speed_m(x) > prev_m);
        prev_p = p.scale_p(x);
        prev_m = p.speed_m(x);
    }
}

TEST_CASE("reversal and tail slicing") {
    auto p = WidthProfile::trig(1.0, {{0.2, 3.0, 0.7}}, 1.2);
    auto r = p.reversed();
    for (double x : {0.0, 0.3, 0.77, 1.2})
        CHECK(r.width(x) == doctest::Approx(p.width(1.2 - x)).epsilon(1e-13));
    auto rr = r.reversed();
    for (double x : {0.1, 0.6, 1.0}) CHECK(rr.width(x) == doctest::Approx(p.width(x)).epsilon(1e-13));
    auto t = p.tail(0.5);
    CHECK(t.length() == doctest::Approx(0.7));
    for (double x : {0.0, 0.2, 0.7}) CHECK(t.width(x) == doctest::Approx(p.width(0.5 + x)).epsilon(1e-13));
    CHECK_THROWS_AS(WidthProfile::tip_power(0.2, 0.5, 0.3).reversed(), domain_error);
}

TEST_CASE("coefficient round trip") {
    auto p = WidthProfile::trig(0.9, {{0.2, 3.0, 0.7}, {0.05, 5.5, 1.0}}, 1.2);
    auto q = WidthProfile::from_coeffs(p.coeffs(), 1.2);
    CHECK(q == p);
    CHECK_THROWS_AS(WidthProfile::from_coeffs({1.0, 2.0, 3.0}, 1.0), domain_error);
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(WidthProfile::constant(-1.0, 1.0), domain_error);
    CHECK_THROWS_AS(WidthProfile::tip_power(0.2, 1.5, 0.3), domain_error);
    CHECK_THROWS_AS(WidthProfile::trig(0.1, {{0.5, 3.0, 0.0}}, 1.0), domain_error);
    auto p = WidthProfile::constant(1.0, 1.0);
    CHECK_THROWS_AS(p.scale_p(1.5), domain_error);
}

TEST_SUITE_END();
