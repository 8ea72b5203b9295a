#include <doctest.h>

#include <cmath>
#include <limits>

#include "starris/channel.hpp"
#include "starris/errors.hpp"

using namespace starris;

namespace {

double wrap_pi(double x) {
    x = std::fmod(x + kPi, 2.0 * kPi);
    if (x < 0) x += 2.0 * kPi;
    return x - kPi;
}

// |E x|^2 / Var x over the entries of one matrix.
double estimate_k_factor(const ComplexMatrix& m, const ComplexMatrix& los) {
    cplx mean = 0;
    for (std::size_t i = 0; i < m.size(); ++i) mean += m[i] / los[i];
    mean /= static_cast<double>(m.size());
    double var = 0;
    for (std::size_t i = 0; i < m.size(); ++i) var += std::norm(m[i] / los[i] - mean);
    var /= static_cast<double>(m.size());
    return std::norm(mean) / var;
}

}  // namespace

TEST_CASE("path loss in dB") {
    const PathLossParams p;
    const double ref = -20.0 * std::log10(4.0 * kPi * 3.5e9 / 2.998e8);
    CHECK(path_loss_db(p, 1.0, 2.2) == doctest::Approx(ref));
    CHECK(std::abs(ref + 43.34) < 0.02);
    CHECK(path_loss_db(p, 1.0, 3.45) == path_loss_db(p, 1.0, 2.2));
    CHECK(path_loss_db(p, 10.0, 2.2) == doctest::Approx(ref - 22.0));
    CHECK_THROWS_AS(path_loss_db(p, 0.0, 2.2), DomainError);
}

TEST_CASE("amplitude gain") {
    const double lambda = 2.998e8 / 3.5e9;
    CHECK(lambda == doctest::Approx(0.08566).epsilon(1e-4));
    CHECK(amplitude_gain(lambda, 1.0, 2.0) == doctest::Approx(6.816e-3).epsilon(1e-3));
    CHECK(amplitude_gain(lambda, 2.0, 2.0) == doctest::Approx(amplitude_gain(lambda, 1.0, 2.0) / 2.0));
    CHECK(amplitude_gain(lambda, 52.086, 2.2) == doctest::Approx(8.84e-5).epsilon(5e-3));
    CHECK_THROWS_AS(amplitude_gain(lambda, -1.0, 2.0), DomainError);
}

TEST_CASE("los phasor") {
    CHECK(std::abs(los_phasor(3.5e9, 0.0, 0.0) - cplx(1, 0)) < 1e-15);
    CHECK(std::abs(los_phasor(1.0, 0.0, 0.5) - cplx(-1, 0)) < 1e-15);
    CHECK(std::abs(los_phasor(3.5e9, 11.0, 0.5 / (3.5e9 + 11.0)) - cplx(-1, 0)) < 1e-6);
    RngStream rng(4);
    for (int i = 0; i < 1000; ++i) {
        const cplx z = los_phasor(3.5e9, rng.uniform(-20, 20), rng.uniform(0, 1e-6));
        CHECK(std::abs(std::abs(z) - 1.0) < 1e-12);
    }
}

TEST_CASE("static rician limits and K-factor") {
    RngStream rng(8);
    const ComplexMatrix los = upa_steering(4, 4, {48, 20, 3}, {50, 22, 1.5});
    const auto pure = static_rician_channel(rng, 1, 16, 1e9, 0.3, los);
    for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(pure[i] - 0.3 * los[i]) < 1e-4 * 0.3);
    CHECK(los_weight(0.0) == 0.0);

    const ComplexMatrix ones(400, 250, cplx(1, 0));
    const auto m = static_rician_channel(rng, 400, 250, 10.0, 2e-4, ones);
    CHECK(std::abs(estimate_k_factor(m, ones) - 10.0) < 0.5);
    CHECK_THROWS_AS(static_rician_channel(rng, 2, 2, 10.0, 1.0, ones), ShapeError);
}

TEST_CASE("steering vectors are unit modulus with a unit first entry") {
    const auto a = ula_steering(4, {0, 0, 0}, {48, 20, 3});
    const auto b = upa_steering(4, 3, {48, 20, 3}, {25, 5, 1.5});
    CHECK(b.size() == 12);
    CHECK(std::abs(a[0] - cplx(1, 0)) < 1e-15);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(std::abs(a[i]) - 1.0) < 1e-14);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(std::abs(std::abs(b[i]) - 1.0) < 1e-14);
    // Broadside along y: ULA along x sees no progressive phase.
    const auto c = ula_steering(4, {0, 0, 0}, {0, 10, 0});
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(c[i] - cplx(1, 0)) < 1e-12);
}

TEST_CASE("time-varying direct link without scattering") {
    PathLossParams pl;
    RicianParams ric;
    ric.direct_los = 1e300;
    ric.direct_nlos = std::numeric_limits<double>::infinity();
    const Position3D bs{0, 0, 0};
    const Position3D u{30, 40, 0};
    RngStream rng(1);

    const auto h1 = time_varying_direct(rng, u, u, bs, 3, pl, ric);
    const auto h2 = time_varying_direct(rng, u, u, bs, 3, pl, ric);
    CHECK(h1 == h2);
    const double b = amplitude_gain(pl.wavelength(), 50.0, pl.zeta_direct);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(std::abs(h1[i]) - b) < 1e-15 * b + 1e-300);

    // Move 1 m straight toward the BS.
    const Position3D v{30 * 49.0 / 50.0, 40 * 49.0 / 50.0, 0};
    const auto h3 = time_varying_direct(rng, u, v, bs, 3, pl, ric);
    const long double fc = pl.f_c;
    const long double fd = fc / 2.998e8L;
    const long double tau1 = 50.0L / 2.998e8L;
    const long double tau2 = 49.0L / 2.998e8L;
    const auto frac = [](long double c) { return static_cast<double>(c - std::floor(c)); };
    const double expect1 = -2.0 * kPi * frac(fc * tau1);
    const double expect2 = -2.0 * kPi * frac((fc + fd) * tau2);
    CHECK(std::abs(wrap_pi(std::arg(h1[0]) - expect1)) < 1e-6);
    CHECK(std::abs(wrap_pi(std::arg(h3[0]) - expect2)) < 1e-6);
    CHECK(std::abs(wrap_pi(std::arg(h3[0]) - std::arg(h1[0]) - (expect2 - expect1))) < 1e-6);
    const double b2 = amplitude_gain(pl.wavelength(), 49.0, pl.zeta_direct);
    CHECK(std::abs(h3[1]) == doctest::Approx(b2).epsilon(1e-12));
}

TEST_CASE("time-varying RIS-user link without scattering") {
    PathLossParams pl;
    RicianParams ric;
    ric.ris_user_los = 1e300;
    ric.ris_user_nlos = std::numeric_limits<double>::infinity();
    const Position3D ris{48, 20, 3};
    const Position3D u{45, 18, 1.5};
    RngStream rng(3);
    const auto g1 = time_varying_ris_user(rng, u, u, ris, 16, pl, ric);
    const auto g2 = time_varying_ris_user(rng, u, u, ris, 16, pl, ric);
    CHECK(g1 == g2);
    const double b = amplitude_gain(pl.wavelength(), distance(u, ris), pl.zeta_ris);
    for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(g1[i]) == doctest::Approx(b).epsilon(1e-12));
    const double tau = distance(u, ris) / 2.998e8;
    CHECK(std::abs(wrap_pi(std::arg(g1[0]) + 2.0 * kPi * (pl.f_c * tau - std::floor(pl.f_c * tau)))) < 1e-6);
}

TEST_CASE("time-varying BS-RIS channel") {
    PathLossParams pl;
    RicianParams ric;
    ric.bs_ris_nlos = std::numeric_limits<double>::infinity();
    ric.bs_ris_los = 1e300;
    const Position3D bs{0, 0, 0};
    const Position3D ris{48, 20, 3};
    RngStream rng(6);
    const double b = amplitude_gain(pl.wavelength(), distance(bs, ris), pl.zeta_ris);
    const auto g = time_varying_bs_ris(rng, bs, ris, 4, 2, pl, ric);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == cplx(b, 0));

    RicianParams scattered;
    scattered.bs_ris_nlos = 3.0;
    const double los = b * los_weight(scattered.bs_ris_los);
    double var = 0;
    const int steps = 100000;
    for (int t = 0; t < steps; ++t) {
        const auto s = time_varying_bs_ris(rng, bs, ris, 1, 1, pl, scattered);
        var += std::norm(s[0] - los);
    }
    var /= steps;
    CHECK(var == doctest::Approx(b * b / 4.0).epsilon(0.05));
}

TEST_CASE("static channel set shapes") {
    RngStream rng(10);
    Scene sc;
    sc.users_r = {{45, 18, 1.5}};
    sc.users_t = {{50, 22, 1.5}, {70, 35, 1.5}};
    const auto cs = static_channel_set(rng, sc, ArrayShape{4, 4, 4}, PathLossParams{}, RicianParams{});
    CHECK(cs.G.rows() == 16);
    CHECK(cs.G.cols() == 4);
    CHECK(cs.g_r.size() == 1);
    CHECK(cs.g_t.size() == 2);
    CHECK(cs.h_t[1].cols() == 4);
    CHECK(cs.g_t[0].cols() == 16);
}
