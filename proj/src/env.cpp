#include "starris/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "starris/errors.hpp"

namespace starris {

void EnvConfig::validate() const {
    if (shape.n_h == 0 || shape.n_v == 0) throw ConfigError("ris.n_h/n_v", "must be positive");
    if (shape.m == 0) throw ConfigError("bs.antennas", "must be positive");
    if (users() == 0) throw ConfigError("users", "at least one user required");
    if (users() >= elements()) throw ConfigError("users", "K+L must be smaller than the element count N");
    if (mu < 0.0 || !std::isfinite(mu)) throw ConfigError("mu", "must be a finite non-negative number");
    if (episode_length == 0) throw ConfigError("steps_per_episode", "must be at least 1");
    if (!(mobility_box_side > 0.0)) throw ConfigError("mobility.box_side", "must be positive");
    if (!(mobility_speed > 0.0)) throw ConfigError("mobility.speed", "must be positive");
    try {
        budget.validate();
        path_loss.validate();
        rician.validate();
    } catch (const DomainError& e) {
        throw ConfigError("channel", e.what());
    }
}

std::size_t assignment_bin(double code, std::size_t users) {
    const std::size_t bins = users + 1;
    const double width = 2.0 / static_cast<double>(bins);
    const double pos = std::floor((std::clamp(code, -1.0, 1.0) + 1.0) / width);
    return std::min(static_cast<std::size_t>(std::max(pos, 0.0)), bins - 1);
}

double bin_center(std::size_t bin, std::size_t users) {
    const double width = 2.0 / static_cast<double>(users + 1);
    return -1.0 + (static_cast<double>(bin) + 0.5) * width;
}

Decoded decode_action(std::span<const double> raw, const EnvConfig& cfg) {
    const std::size_t n = cfg.elements();
    const std::size_t users = cfg.users();
    if (raw.size() != 2 * n) {
        throw ShapeError("decode_action: expected " + std::to_string(2 * n) + " entries, got " +
                         std::to_string(raw.size()));
    }
    Decoded d{PhaseConfig{std::vector<double>(n)},
              AssignmentMatrix(cfg.reflection_users(), cfg.transmission_users(), n)};
    for (std::size_t e = 0; e < n; ++e) {
        d.phases.theta[e] = wrap_phase(kPi * (std::clamp(raw[e], -1.0, 1.0) + 1.0));
        const std::size_t bin = assignment_bin(raw[n + e], users);
        if (bin > 0) d.assignment.set(bin - 1, e, true);
    }

    // Repair: every user must own at least one element.
    std::vector<std::size_t> counts(users);
    for (std::size_t u = 0; u < users; ++u) counts[u] = d.assignment.row_sum(u);
    for (std::size_t u = 0; u < users; ++u) {
        if (counts[u] > 0) continue;
        const double center = bin_center(u + 1, users);
        std::size_t best = n;
        double best_gap = std::numeric_limits<double>::infinity();
        for (std::size_t e = 0; e < n; ++e) {
            const int owner = d.assignment.owner(e);
            const bool available = owner < 0 || counts[static_cast<std::size_t>(owner)] > 1;
            if (!available) continue;
            const double gap = std::abs(std::clamp(raw[n + e], -1.0, 1.0) - center);
            if (gap < best_gap) {
                best_gap = gap;
                best = e;
            }
        }
        // K+L < N guarantees a candidate exists.
        const int owner = d.assignment.owner(best);
        if (owner >= 0) --counts[static_cast<std::size_t>(owner)];
        d.assignment.assign(best, static_cast<int>(u));
        ++counts[u];
    }
    return d;
}

std::vector<double> encode_assignment(const AssignmentMatrix& a) {
    std::vector<double> codes(a.elements());
    for (std::size_t e = 0; e < a.elements(); ++e) {
        const int owner = a.owner(e);
        codes[e] = bin_center(static_cast<std::size_t>(owner + 1), a.users());
    }
    return codes;
}

State encode_state(const RateReport& report, const PhaseConfig& theta, const AssignmentMatrix& a) {
    const std::size_t n = a.elements();
    if (theta.theta.size() != n || report.sinr_r.size() + report.sinr_t.size() != a.users()) {
        throw ShapeError("encode_state: inconsistent dimensions");
    }
    State s;
    s.reserve(a.users() + 2 * n);
    for (double g : report.sinr_r) s.push_back(kStateRateScale * rate(g));
    for (double g : report.sinr_t) s.push_back(kStateRateScale * rate(g));
    for (double t : theta.theta) s.push_back(t / kPi - 1.0);
    const auto codes = encode_assignment(a);
    s.insert(s.end(), codes.begin(), codes.end());
    return s;
}

Environment::Environment(EnvConfig cfg) : cfg_(std::move(cfg)), scene_(cfg_.scene), rng_(mix_seed(cfg_.seed)) {
    cfg_.validate();
    RngStream channel_rng(mix_seed(cfg_.seed ^ 0x5ca1ab1eULL));
    static_channels_ = static_channel_set(channel_rng, cfg_.scene, cfg_.shape, cfg_.path_loss, cfg_.rician);
    channels_ = static_channels_;
}

State Environment::reset(std::uint64_t episode_seed) {
    scene_ = cfg_.scene;
    if (cfg_.mobility == Mobility::kStatic) {
        channels_ = static_channels_;
    } else {
        rng_ = RngStream(mix_seed(mix_seed(cfg_.seed) ^ episode_seed));
        walkers_.clear();
        auto init = [&](std::vector<Position3D>& users) {
            for (auto& p : users) {
                const Bounds2D box = Bounds2D::square(p, cfg_.mobility_box_side);
                WaypointState w;
                w.bounds = box;
                w.speed = cfg_.mobility_speed;
                w.current = uniform_in(box, p.z, rng_);
                w.target = uniform_in(box, p.z, rng_);
                p = w.current;
                walkers_.push_back(w);
            }
        };
        init(scene_.users_r);
        init(scene_.users_t);
        channels_ = time_varying_channel_set(rng_, scene_, scene_, cfg_.shape, cfg_.path_loss, cfg_.rician);
    }

    const std::size_t n = cfg_.elements();
    State s(cfg_.users(), 0.0);
    s.resize(cfg_.users() + n, 0.0);  // theta = pi for every element
    const auto codes = encode_assignment(
        block_partition_assignment(n, cfg_.reflection_users(), cfg_.transmission_users()));
    s.insert(s.end(), codes.begin(), codes.end());
    return s;
}

void Environment::advance_users() {
    std::size_t i = 0;
    for (auto& p : scene_.users_r) {
        walkers_[i] = rwp_step(walkers_[i], rng_);
        p = walkers_[i++].current;
    }
    for (auto& p : scene_.users_t) {
        walkers_[i] = rwp_step(walkers_[i], rng_);
        p = walkers_[i++].current;
    }
}

RateReport Environment::evaluate_config(const Decoded& d) const {
    return evaluate(channels_, d.assignment, d.phases, cfg_.budget);
}

StepResult Environment::step(std::span<const double> action) {
    StepResult out;
    out.decoded = decode_action(action, cfg_);
    if (cfg_.mobility == Mobility::kRandomWaypoint) {
        if (walkers_.empty()) reset(0);
        const Scene prev = scene_;
        advance_users();
        channels_ = time_varying_channel_set(rng_, prev, scene_, cfg_.shape, cfg_.path_loss, cfg_.rician);
    }
    out.report = evaluate(channels_, out.decoded.assignment, out.decoded.phases, cfg_.budget);
    out.active_count = active_element_count(out.decoded.assignment);
    out.reward = reward_penalized(out.report.rate_r, out.report.rate_t, cfg_.mu, out.active_count);
    out.next_state = encode_state(out.report, out.decoded.phases, out.decoded.assignment);
    return out;
}

}  // namespace starris
