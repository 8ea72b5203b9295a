#include "starris/channel.hpp"

#include <cmath>
#include <string>

#include "starris/errors.hpp"

namespace starris {

namespace {

void require_positive_distance(double d, const char* op) {
    if (!(d > 0.0)) throw DomainError(std::string(op) + ": distance must be positive");
}

struct Direction {
    double ux, uy, uz;
};

Direction unit_direction(const Position3D& from, const Position3D& to) {
    const double d = distance(from, to);
    require_positive_distance(d, "steering");
    return {(to.x - from.x) / d, (to.y - from.y) / d, (to.z - from.z) / d};
}

// Shared body of the two time-varying user links.
ComplexMatrix time_varying_user_link(RngStream& rng, const Position3D& prev, const Position3D& curr,
                                     const Position3D& anchor, std::size_t cols, double zeta,
                                     double kappa_los, double kappa_nlos, const PathLossParams& pl) {
    const double d = distance(curr, anchor);
    const double gain = amplitude_gain(pl.wavelength(), d, zeta);
    // One step is one second, so metres per step equal m/s.
    const double f_d = doppler_shift(radial_speed(prev, curr, anchor), pl.f_c);
    const cplx los = los_phasor(pl.f_c, f_d, d / kSpeedOfLight);
    const double wl = los_weight(kappa_los);
    const double wn = nlos_weight(kappa_nlos);
    ComplexMatrix out(1, cols);
    for (auto& x : out.data()) x = gain * (wl * los + wn * rng.complex_normal());
    return out;
}

}  // namespace

void PathLossParams::validate() const {
    if (!(f_c > 0.0)) throw DomainError("PathLossParams: f_c must be positive");
    if (!(zeta_ris > 0.0) || !(zeta_direct > 0.0)) throw DomainError("PathLossParams: exponents must be positive");
    if (!(d0 > 0.0)) throw DomainError("PathLossParams: d0 must be positive");
}

void RicianParams::validate() const {
    for (double k : {direct_los, direct_nlos, ris_user_los, ris_user_nlos, bs_ris_los, bs_ris_nlos}) {
        if (!(k >= 0.0)) throw DomainError("RicianParams: factors must be non-negative");
    }
}

double path_loss_db(const PathLossParams& p, double d, double zeta) {
    require_positive_distance(d, "path_loss_db");
    return -20.0 * std::log10(4.0 * kPi * p.f_c / kSpeedOfLight) - 10.0 * zeta * std::log10(d / p.d0);
}

double amplitude_gain(double lambda_c, double d, double zeta) {
    require_positive_distance(d, "amplitude_gain");
    return lambda_c / (4.0 * kPi * std::pow(d, zeta / 2.0));
}

cplx los_phasor(double f_c, double f_d, double tau) {
    // Reduce the cycle count first; f_c * tau is ~1e2..1e3 cycles.
    const double cycles = (f_c + f_d) * tau;
    const double frac = cycles - std::floor(cycles);
    return std::polar(1.0, -2.0 * kPi * frac);
}

ComplexMatrix ula_steering(std::size_t m, const Position3D& from, const Position3D& to) {
    const Direction u = unit_direction(from, to);
    ComplexMatrix a(1, m);
    for (std::size_t i = 0; i < m; ++i) a[i] = std::polar(1.0, -kPi * static_cast<double>(i) * u.ux);
    return a;
}

ComplexMatrix upa_steering(std::size_t n_h, std::size_t n_v, const Position3D& from, const Position3D& to) {
    const Direction u = unit_direction(from, to);
    ComplexMatrix a(1, n_h * n_v);
    for (std::size_t v = 0; v < n_v; ++v) {
        for (std::size_t h = 0; h < n_h; ++h) {
            const double phase = -kPi * (static_cast<double>(h) * u.uy + static_cast<double>(v) * u.uz);
            a[v * n_h + h] = std::polar(1.0, phase);
        }
    }
    return a;
}

ComplexMatrix static_rician_channel(RngStream& rng, std::size_t rows, std::size_t cols, double kappa,
                                    double gain, const ComplexMatrix& los) {
    if (los.rows() != rows || los.cols() != cols) {
        throw ShapeError("static_rician_channel: LoS shape does not match requested shape");
    }
    if (!(kappa >= 0.0)) throw DomainError("static_rician_channel: kappa must be non-negative");
    const double wl = los_weight(kappa);
    const double wn = nlos_weight(kappa);
    ComplexMatrix out(rows, cols);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = gain * (wl * los[i] + wn * rng.complex_normal());
    return out;
}

ComplexMatrix time_varying_direct(RngStream& rng, const Position3D& prev, const Position3D& curr,
                                  const Position3D& bs, std::size_t m, const PathLossParams& pl,
                                  const RicianParams& ric) {
    return time_varying_user_link(rng, prev, curr, bs, m, pl.zeta_direct, ric.direct_los, ric.direct_nlos, pl);
}

ComplexMatrix time_varying_ris_user(RngStream& rng, const Position3D& prev, const Position3D& curr,
                                    const Position3D& ris, std::size_t n, const PathLossParams& pl,
                                    const RicianParams& ric) {
    return time_varying_user_link(rng, prev, curr, ris, n, pl.zeta_ris, ric.ris_user_los, ric.ris_user_nlos, pl);
}

ComplexMatrix time_varying_bs_ris(RngStream& rng, const Position3D& bs, const Position3D& ris, std::size_t n,
                                  std::size_t m, const PathLossParams& pl, const RicianParams& ric) {
    const double gain = amplitude_gain(pl.wavelength(), distance(bs, ris), pl.zeta_ris);
    const double wl = los_weight(ric.bs_ris_los);
    const double wn = nlos_weight(ric.bs_ris_nlos);
    ComplexMatrix out(n, m);
    for (auto& x : out.data()) x = gain * (wl * 1.0 + wn * rng.complex_normal());
    return out;
}

ChannelSet static_channel_set(RngStream& rng, const Scene& scene, const ArrayShape& shape,
                              const PathLossParams& pl, const RicianParams& ric) {
    const std::size_t n = shape.elements();
    const std::size_t m = shape.m;
    const double lambda = pl.wavelength();
    ChannelSet cs;

    const ComplexMatrix at_ris = upa_steering(shape.n_h, shape.n_v, scene.ris, scene.bs);
    const ComplexMatrix at_bs = ula_steering(m, scene.bs, scene.ris);
    // Rank-one LoS: arrival response at the RIS times departure response at the BS.
    const ComplexMatrix g_los = matmul(ComplexMatrix::column_vector(at_ris.data()), at_bs);
    cs.G = static_rician_channel(rng, n, m, ric.bs_ris_los,
                                 amplitude_gain(lambda, distance(scene.bs, scene.ris), pl.zeta_ris), g_los);

    auto user_links = [&](const std::vector<Position3D>& users, std::vector<ComplexMatrix>& g,
                          std::vector<ComplexMatrix>& h) {
        for (const auto& u : users) {
            g.push_back(static_rician_channel(rng, 1, n, ric.ris_user_los,
                                              amplitude_gain(lambda, distance(scene.ris, u), pl.zeta_ris),
                                              upa_steering(shape.n_h, shape.n_v, scene.ris, u)));
            h.push_back(static_rician_channel(rng, 1, m, ric.direct_los,
                                              amplitude_gain(lambda, distance(scene.bs, u), pl.zeta_direct),
                                              ula_steering(m, scene.bs, u)));
        }
    };
    user_links(scene.users_r, cs.g_r, cs.h_r);
    user_links(scene.users_t, cs.g_t, cs.h_t);
    return cs;
}

ChannelSet time_varying_channel_set(RngStream& rng, const Scene& prev, const Scene& curr,
                                    const ArrayShape& shape, const PathLossParams& pl,
                                    const RicianParams& ric) {
    const std::size_t n = shape.elements();
    const std::size_t m = shape.m;
    ChannelSet cs;
    cs.G = time_varying_bs_ris(rng, curr.bs, curr.ris, n, m, pl, ric);
    for (std::size_t k = 0; k < curr.users_r.size(); ++k) {
        cs.g_r.push_back(time_varying_ris_user(rng, prev.users_r[k], curr.users_r[k], curr.ris, n, pl, ric));
        cs.h_r.push_back(time_varying_direct(rng, prev.users_r[k], curr.users_r[k], curr.bs, m, pl, ric));
    }
    for (std::size_t l = 0; l < curr.users_t.size(); ++l) {
        cs.g_t.push_back(time_varying_ris_user(rng, prev.users_t[l], curr.users_t[l], curr.ris, n, pl, ric));
        cs.h_t.push_back(time_varying_direct(rng, prev.users_t[l], curr.users_t[l], curr.bs, m, pl, ric));
    }
    return cs;
}

}  // namespace starris
