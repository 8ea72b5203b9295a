#pragma once

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "starris/phy.hpp"

// Random small instance evaluated both by the library and by the oracle.
struct SinrInstance {
    starris::ChannelSet ch;
    starris::AssignmentMatrix a;
    starris::PhaseConfig theta;
    starris::LinkBudget budget;
};

inline SinrInstance random_sinr_instance(starris::RngStream& rng) {
    using namespace starris;
    SinrInstance in;
    const std::size_t n = 2 + rng.uniform_index(3);  // 2..4
    const std::size_t m = 1 + rng.uniform_index(2);  // 1..2
    const std::size_t k = 1 + rng.uniform_index(std::min<std::size_t>(2, n - 1));
    const std::size_t l = 1 + rng.uniform_index(std::min<std::size_t>(2, n - k));
    auto rnd = [&](std::size_t r, std::size_t c, double scale) {
        ComplexMatrix x(r, c);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = scale * rng.complex_normal();
        return x;
    };
    in.ch.G = rnd(n, m, 1e-3);
    for (std::size_t i = 0; i < k; ++i) {
        in.ch.g_r.push_back(rnd(1, n, 1e-4));
        in.ch.h_r.push_back(rnd(1, m, 1e-6));
    }
    for (std::size_t i = 0; i < l; ++i) {
        in.ch.g_t.push_back(rnd(1, n, 1e-4));
        in.ch.h_t.push_back(rnd(1, m, 1e-6));
    }
    // Every user gets one distinct element, the rest are random owners or shut down.
    in.a = AssignmentMatrix(k, l, n);
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
    for (std::size_t u = 0; u < k + l; ++u) in.a.assign(perm[u], static_cast<int>(u));
    for (std::size_t i = k + l; i < n; ++i) in.a.assign(perm[i], static_cast<int>(rng.uniform_index(k + l + 1)) - 1);
    for (std::size_t e = 0; e < n; ++e) in.theta.theta.push_back(rng.uniform(0, 2 * kPi));
    in.budget = LinkBudget::make(rng.uniform(0.1, 2.0), -174.0, 1e8);
    return in;
}

// Oracle SINRs: reflection users then transmission users.
inline std::vector<double> oracle_sinrs(const SinrInstance& in) {
    using oracle::Mat;
    using oracle::Vec;
    const std::size_t n = in.ch.G.rows();
    const std::size_t m = in.ch.G.cols();
    auto vec = [](const starris::ComplexMatrix& x) { return Vec(x.data().begin(), x.data().end()); };
    Mat G(n, Vec(m));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < m; ++c) G[r][c] = in.ch.G(r, c);

    std::vector<double> out;
    auto space = [&](std::size_t offset, const std::vector<starris::ComplexMatrix>& gs,
                     const std::vector<starris::ComplexMatrix>& hs, bool reflect) {
        std::vector<Vec> g, h, w;
        std::vector<Mat> th;
        for (std::size_t j = 0; j < gs.size(); ++j) {
            std::vector<int> row(n), beta(n);
            for (std::size_t e = 0; e < n; ++e) {
                row[e] = in.a(offset + j, e);
                // Element mode follows whichever space owns it.
                const int o = in.a.owner(e);
                const bool owned_by_reflection = o >= 0 && static_cast<std::size_t>(o) < in.a.reflection_users();
                beta[e] = o >= 0 && (owned_by_reflection == reflect);
            }
            g.push_back(vec(gs[j]));
            h.push_back(vec(hs[j]));
            th.push_back(oracle::theta_matrix(row, beta, in.theta.theta));
        }
        for (std::size_t j = 0; j < g.size(); ++j) w.push_back(oracle::mrt(oracle::cascade(g[j], th[j], G), h[j]));
        for (std::size_t j = 0; j < g.size(); ++j)
            out.push_back(oracle::sinr(j, g, th, G, h, w, in.budget.p, in.budget.sigma_sq));
    };
    space(0, in.ch.g_r, in.ch.h_r, true);
    space(in.a.reflection_users(), in.ch.g_t, in.ch.h_t, false);
    return out;
}

// Library SINRs through the N x N effective-matrix route.
inline std::vector<double> library_sinrs(const SinrInstance& in) {
    using namespace starris;
    const auto coeffs = user_coefficients(in.a, in.theta);
    const std::size_t k = in.a.reflection_users();
    const std::size_t l = in.a.transmission_users();
    std::vector<ComplexMatrix> th_r, th_t, w_r, w_t;
    for (std::size_t j = 0; j < k; ++j) th_r.push_back(effective_matrix(coeffs[j]));
    for (std::size_t j = 0; j < l; ++j) th_t.push_back(effective_matrix(coeffs[k + j]));
    for (std::size_t j = 0; j < k; ++j) w_r.push_back(mrt_beamformer(in.ch.g_r[j], th_r[j], in.ch.G, in.ch.h_r[j]));
    for (std::size_t j = 0; j < l; ++j) w_t.push_back(mrt_beamformer(in.ch.g_t[j], th_t[j], in.ch.G, in.ch.h_t[j]));
    std::vector<double> out;
    for (std::size_t j = 0; j < k; ++j) out.push_back(sinr_reflection(j, in.ch, th_r, w_r, in.budget));
    for (std::size_t j = 0; j < l; ++j) out.push_back(sinr_transmission(j, in.ch, th_t, w_t, in.budget));
    return out;
}

inline double relative_error(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}
