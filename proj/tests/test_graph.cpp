#include <doctest.h>

#include <cmath>

#include "chanfront/errors.hpp"
#include "chanfront/graph.hpp"
#include "chanfront/quad.hpp"

using namespace chanfront;

TEST_SUITE_BEGIN("graph");

namespace {
int count_kind(const MetricGraph& g, GraphVertex::Kind k) {
    int n = 0;
    for (const auto& v : g.vertices) n += v.kind == k;
    return n;
}
} // namespace

TEST_CASE("flat shape, one cell per side: 2 spine + 2 wing edges, 2 junctions, 2 tips") {
    auto g = build_graph(flat_channel(1));
    int spine = 0, wing = 0;
    for (const auto& e : g.edges) (e.is_wing ? wing : spine)++;
    CHECK(spine == 2);
    CHECK(wing == 2);
    CHECK(count_kind(g, GraphVertex::Kind::junction) == 2);
    CHECK(count_kind(g, GraphVertex::Kind::tip) == 2);
    CHECK(count_kind(g, GraphVertex::Kind::seam) == 1);
}

TEST_CASE("four-wing shape: O1..O8 vertex bookkeeping") {
    auto g = build_graph(sample_channel(GeneratorParams{}, 17, 2));
    int spine = 0, wing = 0;
    for (const auto& e : g.edges) (e.is_wing ? wing : spine)++;
    CHECK(wing == 4);
    CHECK(spine == 4);
    CHECK(count_kind(g, GraphVertex::Kind::junction) == 4);
    CHECK(count_kind(g, GraphVertex::Kind::tip) == 4);
    // Every junction carries the conservation identity in its leg weights;
    // the wing sign in the cell frame is x_sign * side.
    for (const auto& v : g.vertices) {
        if (v.kind != GraphVertex::Kind::junction) continue;
        double alpha = 0, beta = 0, gamma = 0;
        double sgn = 0;
        for (const auto& leg : v.legs) {
            const auto& e = g.edges[leg.edge];
            if (e.is_wing) {
                gamma = leg.weight;
                sgn = e.x_sign * e.side;
            } else if ((e.side > 0) == (leg.end == 1))
                alpha = leg.weight; // inner side of the junction
            else
                beta = leg.weight;
        }
        if (gamma > 0 && beta > 0) CHECK(std::abs(alpha - beta - sgn * gamma) < 1e-14);
    }
}

TEST_CASE("measures: unit width and exponential width") {
    auto g = build_graph(flat_channel(2));
    int spine0 = g.spine_pos[0];
    auto m = g.measures(spine0, 1.0);
    CHECK(m.p == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(m.m == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(m.dp_dx == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(m.dm_dx == doctest::Approx(2.0).epsilon(1e-9));
    CHECK_THROWS_AS(g.measures(spine0, 2.0), domain_error);
}

TEST_CASE("tip-vanishing wing: finite scale integral with exponent 1-beta growth") {
    auto s = sample_channel(GeneratorParams{}, 5, 3);
    auto g = build_graph(s);
    for (const auto& e : g.edges) {
        if (!e.is_wing) continue;
        double R = e.length();
        auto m99 = g.measures(e.id, 0.99 * R);
        CHECK(std::isfinite(m99.p));
        double beta = e.profile.tip_beta();
        double full = e.profile.scale_p(R);
        double d1 = (full - e.profile.scale_p(R - 1e-3)) / std::pow(1e-3, 1.0 - beta);
        double d2 = (full - e.profile.scale_p(R - 1e-5)) / std::pow(1e-5, 1.0 - beta);
        CHECK(d1 == doctest::Approx(d2).epsilon(1e-5));
        break;
    }
}

TEST_CASE("spine scale and speed integrals agree with direct quadrature") {
    auto s = sample_channel(GeneratorParams{}, 23, 6);
    auto g = build_graph(s);
    for (double x : {0.7, 2.3, -1.9}) {
        double direct = adaptive_quad([&](double y) { return 1.0 / g.spine_width(y); },
                                      std::min(0.0, x), std::max(0.0, x), 1e-10, 1e-13);
        if (x < 0) direct = -direct;
        CHECK(g.spine_scale(x) == doctest::Approx(direct).epsilon(1e-8));
        double dm = adaptive_quad([&](double y) { return 2.0 * g.spine_width(y); },
                                  std::min(0.0, x), std::max(0.0, x), 1e-10, 1e-13);
        if (x < 0) dm = -dm;
        CHECK(g.spine_speed(x) == doctest::Approx(dm).epsilon(1e-8));
    }
}

TEST_CASE("mirror reflects the spine width field") {
    auto s = sample_channel(GeneratorParams{}, 23, 5);
    auto g = build_graph(s);
    auto gm = build_graph(mirror(s));
    for (double x : {0.3, 1.7, 3.2})
        CHECK(gm.spine_width(x) == doctest::Approx(g.spine_width(-x)).epsilon(1e-12));
}

TEST_CASE("identify on a rectangular shape with spine tie-break") {
    GeneratorParams p;
    p.rectangular = true;
    p.amplitude = 0.0;
    p.width_min = 0.8;
    p.width_max = 1.2;
    p.wing_max = 0.4;
    auto s = sample_channel(p, 41, 6);
    auto g = build_graph(s);
    // Any point in the spine band maps to the spine edge at that x.
    auto [x1, e1] = identify(g, s, 0.7, 0.2);
    CHECK(x1 == 0.7);
    CHECK(!g.edges[e1].is_wing);
    // A point inside a wing band maps to the wing.
    bool tested_wing = false;
    for (const auto& e : g.edges) {
        if (!e.is_wing || e.side < 0) continue;
        double xa = e.global_x(0.0), xb = e.global_x(e.length());
        double xm = 0.5 * (xa + xb);
        double w = g.spine_width(xm);
        auto [xi, ei] = identify(g, s, xm, w + 0.5 * e.profile.width(std::abs(xm - xa)));
        CHECK(ei == e.id);
        CHECK(g.edges[ei].is_wing);
        // Exactly on the branch cross-section the spine wins.
        auto [xj, ej] = identify(g, s, xa, w + 1e-9);
        CHECK(!g.edges[ej].is_wing);
        tested_wing = true;
        break;
    }
    CHECK(tested_wing);
    CHECK_THROWS_AS(identify(g, s, 0.7, 5.0), domain_error);
    auto strig = sample_channel(GeneratorParams{}, 3, 3);
    CHECK_THROWS_AS(identify(build_graph(strig), strig, 0.5, 0.1), domain_error);
}

TEST_CASE("invalid shapes are rejected with the violation attached") {
    auto s = sample_channel(GeneratorParams{}, 12, 4);
    s.pos[1].gamma += 0.01;
    CHECK_THROWS_AS(build_graph(s), domain_error);
}

TEST_SUITE_END();
