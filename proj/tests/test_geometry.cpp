#include <doctest.h>

#include <cmath>

#include "starris/geometry.hpp"

using namespace starris;

TEST_CASE("distance") {
    CHECK(distance({0, 0, 0}, {0, 0, 0}) == 0.0);
    CHECK(distance({0, 0, 0}, {48, 20, 3}) == doctest::Approx(std::sqrt(2713.0)));
    CHECK(distance({0, 0, 0}, {48, 20, 3}) == doctest::Approx(52.086).epsilon(1e-4));
    CHECK(distance({0, 0, 0}, {3, 4, 0}) == 5.0);
}

TEST_CASE("rwp straight-line advance") {
    RngStream rng(1);
    WaypointState s{{1, 1, 0}, {5, 1, 0}, 1.0, Bounds2D{0, 10, 0, 10}};
    const auto n = rwp_step(s, rng);
    CHECK(n.current == Position3D{2, 1, 0});
    CHECK(n.target == s.target);
}

TEST_CASE("rwp arrival draws a new target inside bounds") {
    RngStream rng(2);
    const Bounds2D box{0, 10, 0, 10};
    WaypointState s{{4.5, 5, 1.5}, {5, 5, 1.5}, 1.0, box};
    const auto n = rwp_step(s, rng);
    CHECK(n.current == Position3D{5, 5, 1.5});
    CHECK(box.contains(n.target));
    CHECK(n.target.z == 1.5);
}

TEST_CASE("rwp containment and exact displacement") {
    RngStream rng(99);
    const Bounds2D box = Bounds2D::square({45, 18, 1.5}, 10.0);
    WaypointState s{{45, 18, 1.5}, uniform_in(box, 1.5, rng), 1.0, box};
    for (int i = 0; i < 10000; ++i) {
        const auto n = rwp_step(s, rng);
        REQUIRE(box.contains(n.current));
        const double expect = std::min(s.speed, distance(s.current, s.target));
        CHECK(std::abs(distance(s.current, n.current) - expect) < 1e-12);
        s = n;
    }
}

TEST_CASE("radial speed") {
    const Position3D anchor{48, 20, 3};
    CHECK(radial_speed({1, 1, 0}, {1, 1, 0}, anchor) == 0.0);
    CHECK(radial_speed({10, 0, 0}, {9, 0, 0}, {0, 0, 0}) == doctest::Approx(1.0));
    // Points on a circle about the anchor.
    const double r = 25.0;
    for (int i = 0; i < 50; ++i) {
        const double a = 0.1 * i;
        const double b = a + 0.04;
        const Position3D p{anchor.x + r * std::cos(a), anchor.y + r * std::sin(a), anchor.z};
        const Position3D q{anchor.x + r * std::cos(b), anchor.y + r * std::sin(b), anchor.z};
        CHECK(std::abs(radial_speed(p, q, anchor)) < 1e-9 * r);
    }
}

TEST_CASE("doppler shift") {
    CHECK(doppler_shift(0.0, 3.5e9) == 0.0);
    CHECK(doppler_shift(1.0, 3.5e9) == doctest::Approx(11.674).epsilon(1e-3));
    CHECK(doppler_shift(-1.0, 3.5e9) == -doppler_shift(1.0, 3.5e9));
}
