#include <doctest.h>

#include <cmath>

#include "starris/errors.hpp"
#include "starris/star_ris.hpp"

using namespace starris;

namespace {

AssignmentMatrix random_valid(RngStream& rng, std::size_t k, std::size_t l, std::size_t n) {
    AssignmentMatrix a(k, l, n);
    for (std::size_t e = 0; e < n; ++e) {
        const auto pick = static_cast<int>(rng.uniform_index(k + l + 1)) - 1;
        a.assign(e, pick);
    }
    return a;
}

}  // namespace

TEST_CASE("modes from assignment") {
    const AssignmentMatrix zero(2, 2, 6);
    const auto m0 = modes_from_assignment(zero);
    CHECK(m0.transmitting() == 0);
    CHECK(m0.reflecting() == 0);

    AssignmentMatrix a(1, 1, 2);
    a.set(0, 0, true);
    a.set(1, 1, true);
    const auto m = modes_from_assignment(a);
    CHECK(m.beta_r == std::vector<std::uint8_t>{1, 0});
    CHECK(m.beta_t == std::vector<std::uint8_t>{0, 1});

    RngStream rng(12);
    AssignmentMatrix big(3, 3, 20);
    std::size_t placed = 0;
    for (std::size_t e = 0; e < 20 && placed < 10; e += 2, ++placed) big.assign(e, static_cast<int>(rng.uniform_index(6)));
    const auto mb = modes_from_assignment(big);
    std::size_t ones = 0;
    for (std::size_t e = 0; e < 20; ++e) {
        CHECK(mb.beta_t[e] + mb.beta_r[e] <= 1);
        ones += mb.beta_t[e] + mb.beta_r[e];
    }
    CHECK(ones == 10);

    AssignmentMatrix bad(1, 1, 2);
    bad.set(0, 0, true);
    bad.set(1, 0, true);
    CHECK_THROWS_AS(modes_from_assignment(bad), ConstraintError);
}

TEST_CASE("effective coefficients") {
    const std::vector<std::uint8_t> zeros(3, 0), ones(3, 1);
    const auto z = effective_coefficients(zeros, ones, PhaseConfig{{0.1, 0.2, 0.3}});
    for (std::size_t i = 0; i < 3; ++i) CHECK(z[i] == cplx{});

    const std::vector<std::uint8_t> one{1};
    const auto s = effective_coefficients(one, one, PhaseConfig{{kPi}});
    CHECK(std::abs(s[0] - cplx(-1, 0)) < 1e-15);

    RngStream rng(5);
    for (int t = 0; t < 100; ++t) {
        std::vector<std::uint8_t> a(6), b(6);
        PhaseConfig th;
        for (std::size_t i = 0; i < 6; ++i) {
            a[i] = rng.uniform() < 0.5;
            b[i] = rng.uniform() < 0.5;
            th.theta.push_back(rng.uniform(0, 2 * kPi));
        }
        const auto c = effective_coefficients(a, b, th);
        for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(std::abs(c[i]) - a[i] * b[i]) < 1e-15);
    }
}

TEST_CASE("effective matrix") {
    CHECK(effective_matrix(ComplexMatrix(1, 3)) == ComplexMatrix(3, 3));
    RngStream rng(9);
    ComplexMatrix s(1, 3), g(1, 3), G(3, 2);
    for (std::size_t i = 0; i < 3; ++i) {
        s[i] = rng.complex_normal();
        g[i] = rng.complex_normal();
    }
    for (std::size_t i = 0; i < 6; ++i) G[i] = rng.complex_normal();
    const auto full = matmul(matmul(g, effective_matrix(s)), G);
    for (std::size_t c = 0; c < 2; ++c) {
        cplx acc = 0;
        for (std::size_t e = 0; e < 3; ++e) acc += g[e] * s[e] * G(e, c);
        CHECK(std::abs(full[c] - acc) < 1e-14);
    }
    const auto d = effective_matrix(s);
    for (std::size_t i = 0; i < 3; ++i) CHECK(d(i, i) == s[i]);
}

TEST_CASE("active element count and equal partition") {
    CHECK(active_element_count(AssignmentMatrix(3, 3, 144)) == 0);
    const auto a144 = equal_partition_assignment(144, 3, 3);
    CHECK(active_element_count(a144) == 144);
    for (std::size_t u = 0; u < 6; ++u) CHECK(a144.row_sum(u) == 24);

    const auto a36 = equal_partition_assignment(36, 3, 3);
    for (std::size_t u = 0; u < 6; ++u) CHECK(a36.row_sum(u) == 6);
    for (std::size_t e = 0; e < 36; ++e) CHECK(a36.column_sum(e) == 1);
    CHECK(a36.columns_exclusive());
    CHECK(a36.rows_covered());

    CHECK_THROWS_AS(equal_partition_assignment(16, 3, 3), DomainError);
    const auto b = block_partition_assignment(16, 3, 3);
    CHECK(b.row_sum(0) == 3);
    CHECK(b.row_sum(5) == 2);
    CHECK(active_element_count(b) == 16);
}

TEST_CASE("owner and assign keep columns exclusive") {
    RngStream rng(77);
    for (int t = 0; t < 200; ++t) {
        const auto a = random_valid(rng, 2, 2, 8);
        CHECK(a.columns_exclusive());
        for (std::size_t e = 0; e < 8; ++e) {
            const int o = a.owner(e);
            CHECK(a.column_sum(e) == (o < 0 ? 0u : 1u));
        }
    }
    AssignmentMatrix a(1, 1, 3);
    a.assign(1, 0);
    a.assign(1, 1);
    CHECK(a(1, 1));
    CHECK_FALSE(a(0, 1));
    a.assign(1, -1);
    CHECK(a.owner(1) == -1);
}

TEST_CASE("wrap phase") {
    CHECK(wrap_phase(2 * kPi) == doctest::Approx(0.0));
    CHECK(wrap_phase(-kPi / 2) == doctest::Approx(1.5 * kPi));
    CHECK(wrap_phase(kPi) == doctest::Approx(kPi));
}
