#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "starris/channel.hpp"
#include "starris/numerics.hpp"
#include "starris/star_ris.hpp"

namespace starris {

// Thermal noise in watts for a density in dBm/Hz over `bandwidth_hz`.
double noise_power(double density_dbm_hz, double bandwidth_hz);

struct LinkBudget {
    double p = 1.0;                       // W
    double bandwidth = 100e6;             // Hz
    double noise_density_dbm_hz = -174.0;
    double sigma_sq = noise_power(-174.0, 100e6);  // W

    static LinkBudget make(double p, double density_dbm_hz, double bandwidth_hz);
    void validate() const;
};

struct RateReport {
    std::vector<double> sinr_r;
    std::vector<double> sinr_t;
    std::vector<double> rate_r;  // bps/Hz
    std::vector<double> rate_t;
    std::vector<ComplexMatrix> w_r;  // M x 1 each
    std::vector<ComplexMatrix> w_t;

    double total_rate() const;
};

/// MRT exactly as in the system model: w = (g Theta G + h)^H / ||g Theta G||^2.
/// The normalisation deliberately excludes the direct link h.
ComplexMatrix mrt_beamformer(const ComplexMatrix& g, const ComplexMatrix& theta_eff, const ComplexMatrix& G,
                             const ComplexMatrix& h);

// g diag(s) G computed without forming the diagonal matrix.
ComplexMatrix cascaded_channel(const ComplexMatrix& g, const ComplexMatrix& s, const ComplexMatrix& G);

// MRT given the cascaded row v = g Theta G.
ComplexMatrix mrt_from_cascaded(const ComplexMatrix& v, const ComplexMatrix& h);

/// SINR of user `k` in one space. `cascaded[j]` is g_j Theta_j G for every user
/// of that space; interference routes w_k through each other user's cascaded row.
double sinr_from_cascaded(std::size_t k, std::span<const ComplexMatrix> cascaded, const ComplexMatrix& h_k,
                          const ComplexMatrix& w_k, const LinkBudget& budget);

// `thetas` and `ws` hold the N x N effective matrices and beamformers of the
// K reflection (resp. L transmission) users.
double sinr_reflection(std::size_t k, const ChannelSet& channels, std::span<const ComplexMatrix> thetas,
                       std::span<const ComplexMatrix> ws, const LinkBudget& budget);
double sinr_transmission(std::size_t l, const ChannelSet& channels, std::span<const ComplexMatrix> thetas,
                         std::span<const ComplexMatrix> ws, const LinkBudget& budget);

double rate(double gamma);
double reward_avg_rate(std::span<const double> rates_r, std::span<const double> rates_t);
double reward_penalized(std::span<const double> rates_r, std::span<const double> rates_t, double mu,
                        std::size_t active_count);

/// Full per-step pipeline: coefficients, MRT, SINR and rates for every user.
/// Every user must own at least one element with a nonzero cascaded channel.
RateReport evaluate(const ChannelSet& channels, const AssignmentMatrix& a, const PhaseConfig& theta,
                    const LinkBudget& budget);

}  // namespace starris
