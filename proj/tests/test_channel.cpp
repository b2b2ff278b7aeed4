#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "chanfront/channel.hpp"
#include "chanfront/errors.hpp"

using namespace chanfront;

TEST_SUITE_BEGIN("channel");

TEST_CASE("determinism: identical seed and params give byte-identical shapes") {
    GeneratorParams p;
    auto a = sample_channel(p, 42, 20);
    auto b = sample_channel(p, 42, 20);
    CHECK(to_json(a) == to_json(b));
    auto c = sample_channel(p, 43, 20);
    CHECK(to_json(a) != to_json(c));
}

TEST_CASE("prefix property: extending a shape keeps the earlier cells") {
    GeneratorParams p;
    auto a = sample_channel(p, 42, 10);
    auto b = sample_channel(p, 42, 14);
    for (int k = 0; k < 10; ++k) {
        CHECK(a.pos[k].spine_length == b.pos[k].spine_length);
        CHECK(a.pos[k].wing_r == b.pos[k].wing_r);
        CHECK(a.neg[k].alpha == b.neg[k].alpha);
    }
}

TEST_CASE("amplitude zero: spine profiles are exactly constant") {
    GeneratorParams p;
    p.amplitude = 0.0;
    p.width_min = p.width_max = p.width_base = 1.0;
    auto s = sample_channel(p, 9, 3);
    for (const auto& c : s.pos) {
        CHECK(c.spine.kind() == WidthProfile::Kind::constant);
        CHECK(c.spine.width(0.3 * c.spine_length) == 1.0);
        CHECK(c.gamma == 0.0); // continuous width leaves no room for a wing
    }
}

TEST_CASE("mean spine length matches the uniform draw") {
    GeneratorParams p;
    auto s = sample_channel(p, 7, 1000);
    double mean = 0;
    for (const auto& c : s.pos) mean += c.spine_length;
    mean /= 1000;
    double expect = 0.5 * (p.spine_len_lo + p.spine_len_hi);
    double se = (p.spine_len_hi - p.spine_len_lo) / std::sqrt(12.0) / std::sqrt(1000.0);
    CHECK(std::abs(mean - expect) < 3.0 * se);
}

TEST_CASE("junction conservation holds exactly") {
    auto s = sample_channel(GeneratorParams{}, 4, 50);
    for (const auto& c : s.pos) {
        double sign = c.wing_r >= 0 ? 1.0 : -1.0;
        CHECK(c.alpha - c.beta == sign * c.gamma);
        CHECK(std::abs(c.wing_r) <= s.params.wing_max);
        CHECK(c.gamma <= s.params.wing_max);
    }
}

TEST_CASE("mirror swaps sides and is involutive") {
    auto s = sample_channel(GeneratorParams{}, 4, 6);
    auto m = mirror(s);
    CHECK(to_json(mirror(m)) == to_json(s));
    CHECK(m.pos[2].spine_length == s.neg[2].spine_length);
    auto flat = flat_channel(3);
    CHECK(to_json(mirror(flat)) == to_json(flat));
}

TEST_CASE("mirrored cell flips the wing and swaps the junction widths") {
    auto s = sample_channel(GeneratorParams{}, 8, 4);
    Cell c = s.pos[1];
    Cell m = mirrored_cell(c);
    CHECK(m.wing_r == -c.wing_r);
    CHECK(m.alpha == c.beta);
    CHECK(m.beta == c.alpha);
    CHECK(m.spine.width(0.2) == doctest::Approx(c.spine.width(c.spine_length - 0.2)).epsilon(1e-13));
    Cell mm = mirrored_cell(m);
    CHECK(mm.wing_r == c.wing_r);
    CHECK(mm.spine.width(0.7) == doctest::Approx(c.spine.width(0.7)).epsilon(1e-12));
}

TEST_CASE("validate: sampled shapes are clean, violations are reported") {
    auto s = sample_channel(GeneratorParams{}, 12, 30);
    CHECK(validate(s).empty());
    auto flat = flat_channel(4);
    CHECK(validate(flat).empty());

    auto bad = s;
    bad.pos[3].gamma = bad.pos[3].gamma + 0.01; // break conservation
    auto v = validate(bad);
    REQUIRE(!v.empty());
    bool found = false;
    for (const auto& msg : v) found = found || msg.find("conservation") != std::string::npos;
    CHECK(found);

    auto bad2 = s;
    bad2.pos[2].tip_beta = 1.5; // scale integral diverges at the tip
    bool found2 = false;
    for (const auto& msg : validate(bad2))
        found2 = found2 || msg.find("tip") != std::string::npos ||
                 msg.find("diverge") != std::string::npos;
    CHECK(found2);
}

TEST_CASE("channel file round trip is exact") {
    auto s = sample_channel(GeneratorParams{}, 99, 12);
    std::string path = "test_shape_roundtrip.json";
    save_channel(s, path);
    auto t = load_channel(path);
    CHECK(to_json(t) == to_json(s));
    std::remove(path.c_str());
    CHECK_THROWS_AS(shape_from_json("{\"format\":\"other/9\"}"), domain_error);
}

TEST_CASE("parameter-domain errors name the constraint") {
    GeneratorParams p;
    p.width_min = -1;
    CHECK_THROWS_AS(sample_channel(p, 1, 1), domain_error);
    GeneratorParams q;
    q.amplitude = 2.0; // cannot keep widths within bounds
    CHECK_THROWS_AS(sample_channel(q, 1, 1), domain_error);
    CHECK_THROWS_AS(sample_channel(GeneratorParams{}, 1, 0), domain_error);
}

TEST_CASE("rectangular mode: lattice widths and conserving constant wings") {
    GeneratorParams p;
    p.rectangular = true;
    p.amplitude = 0.0;
    p.width_min = 0.8;
    p.width_max = 1.2;
    p.wing_max = 0.4;
    auto s = sample_channel(p, 41, 12);
    CHECK(validate(s).empty());
    for (const auto& c : s.pos) {
        double w = c.spine.width(0.0);
        CHECK(std::abs(w / p.rect_quantum - std::lround(w / p.rect_quantum)) < 1e-9);
        if (c.has_wing()) {
            CHECK(c.tip_beta == 0.0);
            CHECK(c.wing_profile().kind() == WidthProfile::Kind::constant);
        }
    }
    // Both sides meet at the same width at x = 0.
    CHECK(s.pos[0].spine.width(0.0) == s.neg[0].spine.width(0.0));
}

TEST_SUITE_END();
