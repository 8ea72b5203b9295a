#include "starris/phy.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "starris/errors.hpp"

namespace starris {

double noise_power(double density_dbm_hz, double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0)) throw DomainError("noise_power: bandwidth must be positive");
    const double dbm = density_dbm_hz + 10.0 * std::log10(bandwidth_hz);
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

LinkBudget LinkBudget::make(double p, double density_dbm_hz, double bandwidth_hz) {
    LinkBudget b;
    b.p = p;
    b.noise_density_dbm_hz = density_dbm_hz;
    b.bandwidth = bandwidth_hz;
    b.sigma_sq = noise_power(density_dbm_hz, bandwidth_hz);
    return b;
}

void LinkBudget::validate() const {
    if (!(p > 0.0)) throw DomainError("LinkBudget: transmit power must be positive");
    if (!(sigma_sq > 0.0)) throw DomainError("LinkBudget: noise power must be positive");
    const double expected = noise_power(noise_density_dbm_hz, bandwidth);
    if (std::abs(sigma_sq - expected) > 1e-9 * expected) {
        throw DomainError("LinkBudget: sigma_sq inconsistent with density and bandwidth");
    }
}

double RateReport::total_rate() const {
    return std::accumulate(rate_r.begin(), rate_r.end(), 0.0) + std::accumulate(rate_t.begin(), rate_t.end(), 0.0);
}

ComplexMatrix mrt_from_cascaded(const ComplexMatrix& v, const ComplexMatrix& h) {
    const double denom = euclid_norm_sq(v);
    if (!(denom > 0.0)) {
        throw DegenerateBeamformerError("mrt_beamformer: cascaded channel is zero (no active element for this user)");
    }
    ComplexMatrix w = hermitian(v + h);
    w *= 1.0 / denom;
    return w;
}

ComplexMatrix mrt_beamformer(const ComplexMatrix& g, const ComplexMatrix& theta_eff, const ComplexMatrix& G,
                             const ComplexMatrix& h) {
    return mrt_from_cascaded(matmul(matmul(g, theta_eff), G), h);
}

ComplexMatrix cascaded_channel(const ComplexMatrix& g, const ComplexMatrix& s, const ComplexMatrix& G) {
    const std::size_t n = G.rows();
    if (g.size() != n || s.size() != n) throw ShapeError("cascaded_channel: length mismatch");
    ComplexMatrix v(1, G.cols());
    for (std::size_t e = 0; e < n; ++e) {
        const cplx c = g[e] * s[e];
        if (c == cplx{}) continue;
        for (std::size_t m = 0; m < G.cols(); ++m) v[m] += c * G(e, m);
    }
    return v;
}

namespace {

// |row * col|^2 for a 1 x M row and an M x 1 column.
double inner_power(const ComplexMatrix& row, const ComplexMatrix& col) {
    if (row.size() != col.size()) throw ShapeError("inner product length mismatch");
    cplx acc{};
    for (std::size_t i = 0; i < row.size(); ++i) acc += row[i] * col[i];
    return std::norm(acc);
}

double sinr_in_space(std::size_t k, const ComplexMatrix& G, std::span<const ComplexMatrix> g,
                     std::span<const ComplexMatrix> h, std::span<const ComplexMatrix> thetas,
                     std::span<const ComplexMatrix> ws, const LinkBudget& budget) {
    if (k >= g.size() || thetas.size() != g.size() || ws.size() != g.size() || h.size() != g.size()) {
        throw ShapeError("sinr: per-user inputs do not match the number of users");
    }
    std::vector<ComplexMatrix> cascaded;
    cascaded.reserve(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) cascaded.push_back(matmul(matmul(g[j], thetas[j]), G));
    return sinr_from_cascaded(k, cascaded, h[k], ws[k], budget);
}

}  // namespace

double sinr_from_cascaded(std::size_t k, std::span<const ComplexMatrix> cascaded, const ComplexMatrix& h_k,
                          const ComplexMatrix& w_k, const LinkBudget& budget) {
    const ComplexMatrix own = cascaded[k] + h_k;
    const double signal = budget.p * inner_power(own, w_k);
    double interference = 0.0;
    for (std::size_t j = 0; j < cascaded.size(); ++j) {
        if (j != k) interference += budget.p * inner_power(cascaded[j], w_k);
    }
    return signal / (interference + budget.sigma_sq);
}

double sinr_reflection(std::size_t k, const ChannelSet& channels, std::span<const ComplexMatrix> thetas,
                       std::span<const ComplexMatrix> ws, const LinkBudget& budget) {
    return sinr_in_space(k, channels.G, channels.g_r, channels.h_r, thetas, ws, budget);
}

double sinr_transmission(std::size_t l, const ChannelSet& channels, std::span<const ComplexMatrix> thetas,
                         std::span<const ComplexMatrix> ws, const LinkBudget& budget) {
    return sinr_in_space(l, channels.G, channels.g_t, channels.h_t, thetas, ws, budget);
}

double rate(double gamma) {
    if (gamma < 0.0 || std::isnan(gamma)) throw DomainError("rate: SINR must be non-negative");
    return std::log2(1.0 + gamma);
}

double reward_avg_rate(std::span<const double> rates_r, std::span<const double> rates_t) {
    const std::size_t users = rates_r.size() + rates_t.size();
    if (users == 0) throw DomainError("reward_avg_rate: no users");
    const double sum = std::accumulate(rates_r.begin(), rates_r.end(), 0.0) +
                       std::accumulate(rates_t.begin(), rates_t.end(), 0.0);
    return sum / static_cast<double>(users);
}

double reward_penalized(std::span<const double> rates_r, std::span<const double> rates_t, double mu,
                        std::size_t active_count) {
    const double base = reward_avg_rate(rates_r, rates_t);
    if (mu == 0.0) return base;
    if (active_count == 0) throw DomainError("reward_penalized: penalty with zero active elements");
    return base + mu / static_cast<double>(active_count);
}

RateReport evaluate(const ChannelSet& channels, const AssignmentMatrix& a, const PhaseConfig& theta,
                    const LinkBudget& budget) {
    const std::size_t k_users = a.reflection_users();
    const std::size_t l_users = a.transmission_users();
    if (channels.g_r.size() != k_users || channels.g_t.size() != l_users || channels.elements() != a.elements()) {
        throw ShapeError("evaluate: channel set does not match the assignment shape");
    }
    const std::vector<ComplexMatrix> coeffs = user_coefficients(a, theta);

    auto space = [&](std::size_t offset, std::size_t count, const std::vector<ComplexMatrix>& g,
                     const std::vector<ComplexMatrix>& h, std::vector<double>& sinr, std::vector<double>& rates,
                     std::vector<ComplexMatrix>& ws) {
        std::vector<ComplexMatrix> cascaded;
        cascaded.reserve(count);
        for (std::size_t j = 0; j < count; ++j) cascaded.push_back(cascaded_channel(g[j], coeffs[offset + j], channels.G));
        for (std::size_t j = 0; j < count; ++j) ws.push_back(mrt_from_cascaded(cascaded[j], h[j]));
        for (std::size_t j = 0; j < count; ++j) {
            sinr.push_back(sinr_from_cascaded(j, cascaded, h[j], ws[j], budget));
            rates.push_back(rate(sinr.back()));
        }
    };

    RateReport report;
    space(0, k_users, channels.g_r, channels.h_r, report.sinr_r, report.rate_r, report.w_r);
    space(k_users, l_users, channels.g_t, channels.h_t, report.sinr_t, report.rate_t, report.w_t);
    return report;
}

}  // namespace starris
