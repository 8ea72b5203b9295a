#include <doctest.h>

#include <cmath>

#include "starris/env.hpp"
#include "starris/errors.hpp"

using namespace starris;

namespace {

EnvConfig small_config(std::size_t k, std::size_t l, std::size_t nh, std::size_t nv) {
    const std::vector<Position3D> r{{40, 15, 1.5}, {45, 18, 1.5}, {25, 5, 1.5}};
    const std::vector<Position3D> t{{55, 25, 1.5}, {50, 22, 1.5}, {70, 35, 1.5}};
    EnvConfig c;
    c.shape = ArrayShape{nh, nv, 4};
    c.scene.users_r.assign(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(k));
    c.scene.users_t.assign(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(l));
    c.seed = 17;
    return c;
}

double dist2d(const Position3D& a, const Position3D& b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

TEST_CASE("config validation names the field") {
    EnvConfig c = small_config(3, 3, 2, 3);  // K+L = N
    try {
        c.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "users");
    }
    c = small_config(1, 1, 2, 2);
    c.mu = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("decode phases and bins") {
    const EnvConfig c = small_config(3, 3, 3, 3);
    const std::size_t n = 9;
    Action a(2 * n, 0.0);
    a[n + 0] = -0.999;
    a[n + 1] = 0.999;
    for (std::size_t u = 0; u < 6; ++u) a[n + 2 + u] = bin_center(u + 1, 6);
    a[n + 8] = -0.999;
    const auto d = decode_action(a, c);
    CHECK(d.phases.theta[0] == doctest::Approx(kPi));
    CHECK(d.assignment.owner(0) == -1);
    CHECK(d.assignment.owner(1) == 5);  // last transmission user
    CHECK(d.assignment.rows_covered());
    CHECK(d.assignment.columns_exclusive());

    Action low(2 * n, -1.0);
    CHECK(decode_action(low, c).phases.theta[0] == 0.0);
    CHECK_THROWS_AS(decode_action(Action(3, 0.0), c), ShapeError);
}

TEST_CASE("repair from all shut down gives one element per user") {
    const EnvConfig c = small_config(2, 2, 3, 3);
    const std::size_t n = 9;
    Action a(2 * n, 0.0);
    for (std::size_t e = 0; e < n; ++e) a[n + e] = -0.95 + 0.01 * static_cast<double>(e);
    const auto d = decode_action(a, c);
    CHECK(active_element_count(d.assignment) == 4);
    for (std::size_t u = 0; u < 4; ++u) CHECK(d.assignment.row_sum(u) == 1);
    // Highest codes sit nearest the user bins, lowest user first.
    CHECK(d.assignment.owner(8) == 0);
    CHECK(d.assignment.owner(7) == 1);
}

TEST_CASE("repair steals only from users with spares") {
    const EnvConfig c = small_config(1, 1, 2, 2);
    const std::size_t n = 4;
    Action a(2 * n, 0.0);
    for (std::size_t e = 0; e < n; ++e) a[n + e] = bin_center(2, 2);  // all to the transmission user
    const auto d = decode_action(a, c);
    CHECK(d.assignment.row_sum(0) == 1);
    CHECK(d.assignment.row_sum(1) == 3);
    CHECK(d.assignment.owner(0) == 0);  // tie on distance: lowest index
}

TEST_CASE("state encoding") {
    AssignmentMatrix off(1, 1, 3);
    RateReport rep;
    rep.sinr_r = {3.0};
    rep.sinr_t = {0.0};
    const auto s = encode_state(rep, PhaseConfig{{kPi, 0.0, kPi / 2}}, off);
    REQUIRE(s.size() == 2 + 6);
    CHECK(s[0] == doctest::Approx(0.2));
    CHECK(s[1] == 0.0);
    CHECK(s[2] == doctest::Approx(0.0));
    CHECK(s[3] == doctest::Approx(-1.0));
    for (std::size_t e = 0; e < 3; ++e) CHECK(s[5 + e] == bin_center(0, 2));
    for (double x : s) CHECK(std::abs(x) <= 1.0);
}

TEST_CASE("assignment round trip through bin centres") {
    const EnvConfig c = small_config(3, 3, 3, 4);
    const std::size_t n = 12;
    RngStream rng(40);
    for (int t = 0; t < 500; ++t) {
        AssignmentMatrix a(3, 3, n);
        for (std::size_t u = 0; u < 6; ++u) a.assign(u, static_cast<int>(u));
        for (std::size_t e = 6; e < n; ++e) a.assign(e, static_cast<int>(rng.uniform_index(7)) - 1);
        Action act(n, 0.0);
        const auto codes = encode_assignment(a);
        act.insert(act.end(), codes.begin(), codes.end());
        CHECK(decode_action(act, c).assignment == a);
    }
}

TEST_CASE("static step and reward bookkeeping") {
    EnvConfig c = small_config(2, 2, 3, 3);
    Environment env(c);
    env.reset(0);
    RngStream rng(50);
    Action a(18);
    for (auto& x : a) x = rng.uniform(-1, 1);
    const auto r1 = env.step(a);
    const auto r2 = env.step(a);
    CHECK(r1.reward == r2.reward);
    CHECK(r1.reward == doctest::Approx(reward_penalized(r1.report.rate_r, r1.report.rate_t, c.mu, r1.active_count)));

    c.mu = 115.0;
    Environment pen(c);
    pen.reset(0);
    const auto rp = pen.step(a);
    CHECK(rp.reward - r1.reward == doctest::Approx(115.0 / static_cast<double>(r1.active_count)).epsilon(1e-12));
    CHECK(rp.active_count == r1.active_count);
}

TEST_CASE("static reset keeps channels and is deterministic") {
    const EnvConfig c = small_config(2, 2, 3, 3);
    Environment env(c);
    const auto s0 = env.reset(3);
    const auto g0 = env.channels().G;
    env.step(Action(18, 0.3));
    const auto s1 = env.reset(9);
    CHECK(env.channels().G == g0);
    CHECK(s0 == s1);
    CHECK(s0.size() == c.state_dim());
}

TEST_CASE("mobile users stay in their boxes and move at most one step length") {
    EnvConfig c = small_config(2, 2, 3, 3);
    c.mobility = Mobility::kRandomWaypoint;
    Environment env(c);
    const Action a(18, 0.1);
    std::size_t full_steps = 0, steps = 0;
    for (std::uint64_t ep = 0; ep < 1000; ++ep) {
        const auto s0 = env.reset(ep);
        const auto s1 = env.reset(ep);
        REQUIRE(s0 == s1);
        const Scene start = env.scene();
        for (std::size_t i = 0; i < c.scene.users_r.size(); ++i) {
            CHECK(Bounds2D::square(c.scene.users_r[i], 10.0).contains(start.users_r[i]));
        }
        if (ep % 100 != 0) continue;
        Scene prev = start;
        for (int t = 0; t < 20; ++t) {
            env.step(a);
            const Scene& cur = env.scene();
            for (std::size_t i = 0; i < cur.users_t.size(); ++i) {
                CHECK(Bounds2D::square(c.scene.users_t[i], 10.0).contains(cur.users_t[i]));
                const double moved = dist2d(prev.users_t[i], cur.users_t[i]);
                CHECK(moved <= 1.0 + 1e-12);
                ++steps;
                if (std::abs(moved - 1.0) < 1e-12) ++full_steps;
            }
            prev = cur;
        }
    }
    CHECK(full_steps > steps / 2);
}
