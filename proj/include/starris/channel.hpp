#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "starris/geometry.hpp"
#include "starris/numerics.hpp"

namespace starris {

struct PathLossParams {
    double f_c = 3.5e9;        // Hz
    double zeta_ris = 2.2;     // BS-RIS and RIS-user exponent
    double zeta_direct = 3.45; // BS-user exponent
    double d0 = 1.0;           // m

    double wavelength() const { return kSpeedOfLight / f_c; }
    void validate() const;
};

/// Rician factors (linear). The LoS and NLoS weights of each link class use
/// their own factor, as in the time-varying channel model.
struct RicianParams {
    double direct_los = 10.0;
    double direct_nlos = 10.0;
    double ris_user_los = 10.0;
    double ris_user_nlos = 10.0;
    double bs_ris_los = 10.0;
    double bs_ris_nlos = 10.0;

    void validate() const;
};

inline double los_weight(double kappa) { return std::sqrt(kappa / (kappa + 1.0)); }
inline double nlos_weight(double kappa) { return std::sqrt(1.0 / (kappa + 1.0)); }

/// All channels of one time step. Row order of the per-user vectors matches
/// the assignment matrix: reflection users first, then transmission users.
struct ChannelSet {
    ComplexMatrix G;                 // N x M, BS -> RIS
    std::vector<ComplexMatrix> g_r;  // K of 1 x N, RIS -> reflection user
    std::vector<ComplexMatrix> g_t;  // L of 1 x N, RIS -> transmission user
    std::vector<ComplexMatrix> h_r;  // K of 1 x M, BS -> reflection user
    std::vector<ComplexMatrix> h_t;  // L of 1 x M, BS -> transmission user

    std::size_t elements() const { return G.rows(); }
    std::size_t antennas() const { return G.cols(); }
};

// Fixed node placement plus current user positions.
struct Scene {
    Position3D bs{0.0, 0.0, 0.0};
    Position3D ris{48.0, 20.0, 3.0};
    std::vector<Position3D> users_r;
    std::vector<Position3D> users_t;
};

struct ArrayShape {
    std::size_t n_h = 4;  // RIS columns (along y)
    std::size_t n_v = 4;  // RIS rows (along z)
    std::size_t m = 4;    // BS antennas (ULA along x)

    std::size_t elements() const { return n_h * n_v; }
};

// Signed path loss in dB (negative for attenuation).
double path_loss_db(const PathLossParams& p, double d, double zeta);

// lambda / (4 pi d^(zeta/2)).
double amplitude_gain(double lambda_c, double d, double zeta);

// exp(-j 2 pi (f_c + f_d) tau).
cplx los_phasor(double f_c, double f_d, double tau);

// Half-wavelength ULA along x, departure toward `to`.
ComplexMatrix ula_steering(std::size_t m, const Position3D& from, const Position3D& to);
// Half-wavelength UPA in the y-z plane (n_h along y, n_v along z), toward `to`.
ComplexMatrix upa_steering(std::size_t n_h, std::size_t n_v, const Position3D& from, const Position3D& to);

// gain * (sqrt(k/(k+1)) los + sqrt(1/(k+1)) CN(0,1)).
ComplexMatrix static_rician_channel(RngStream& rng, std::size_t rows, std::size_t cols, double kappa,
                                    double gain, const ComplexMatrix& los);

// Direct BS -> user link for a user that moved from `prev` to `curr` in one step.
ComplexMatrix time_varying_direct(RngStream& rng, const Position3D& prev, const Position3D& curr,
                                  const Position3D& bs, std::size_t m, const PathLossParams& pl,
                                  const RicianParams& ric);

ComplexMatrix time_varying_ris_user(RngStream& rng, const Position3D& prev, const Position3D& curr,
                                    const Position3D& ris, std::size_t n, const PathLossParams& pl,
                                    const RicianParams& ric);

// G(t) with an all-ones LoS part and fresh NLoS.
ComplexMatrix time_varying_bs_ris(RngStream& rng, const Position3D& bs, const Position3D& ris, std::size_t n,
                                  std::size_t m, const PathLossParams& pl, const RicianParams& ric);

// Static channels with steering-vector LoS; uses the LoS factor of each link class.
ChannelSet static_channel_set(RngStream& rng, const Scene& scene, const ArrayShape& shape,
                              const PathLossParams& pl, const RicianParams& ric);

// One time-varying snapshot; `prev` holds the user positions one step earlier.
ChannelSet time_varying_channel_set(RngStream& rng, const Scene& prev, const Scene& curr,
                                    const ArrayShape& shape, const PathLossParams& pl,
                                    const RicianParams& ric);

}  // namespace starris
