#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "starris/channel.hpp"
#include "starris/geometry.hpp"
#include "starris/phy.hpp"
#include "starris/star_ris.hpp"

namespace starris {

enum class Mobility { kStatic, kRandomWaypoint };

struct EnvConfig {
    ArrayShape shape;  // N = n_h * n_v elements, M BS antennas
    Scene scene;       // initial placement; K = users_r.size(), L = users_t.size()
    double mu = 0.0;
    Mobility mobility = Mobility::kStatic;
    double mobility_box_side = 10.0;  // m, centred on each initial user position
    double mobility_speed = 1.0;      // m per step
    LinkBudget budget;
    PathLossParams path_loss;
    RicianParams rician;
    std::size_t episode_length = 200;
    std::uint64_t seed = 1;

    std::size_t elements() const { return shape.elements(); }
    std::size_t reflection_users() const { return scene.users_r.size(); }
    std::size_t transmission_users() const { return scene.users_t.size(); }
    std::size_t users() const { return reflection_users() + transmission_users(); }
    std::size_t state_dim() const { return users() + 2 * elements(); }
    std::size_t action_dim() const { return 2 * elements(); }

    // Throws ConfigError naming the offending field.
    void validate() const;
};

// Log-rates enter the state scaled by this factor.
inline constexpr double kStateRateScale = 0.1;

using State = std::vector<double>;
// First N entries: phase codes; last N entries: assignment codes. All in [-1, 1].
using Action = std::vector<double>;

struct Decoded {
    PhaseConfig phases;
    AssignmentMatrix assignment;
};

struct StepResult {
    State next_state;
    double reward = 0.0;
    RateReport report;
    std::size_t active_count = 0;
    Decoded decoded;
};

// Index of the code bin for `code` among users+1 equal bins on [-1, 1]; bin 0 is shutdown.
std::size_t assignment_bin(double code, std::size_t users);
double bin_center(std::size_t bin, std::size_t users);

/// Phase codes map to theta = pi (code + 1). Assignment codes pick a bin; any
/// user left without an element then takes the shut-down or stealable element
/// whose code is nearest its bin centre (lowest index on ties).
Decoded decode_action(std::span<const double> raw, const EnvConfig& cfg);

State encode_state(const RateReport& report, const PhaseConfig& theta, const AssignmentMatrix& a);

// Inverse of the assignment block of encode_state: bin-centre codes for `a`.
std::vector<double> encode_assignment(const AssignmentMatrix& a);

class Environment {
public:
    explicit Environment(EnvConfig cfg);

    const EnvConfig& config() const { return cfg_; }
    const ChannelSet& channels() const { return channels_; }
    const Scene& scene() const { return scene_; }

    State reset(std::uint64_t episode_seed);
    StepResult step(std::span<const double> action);

    // Rates for a decoded configuration on the current channels, without advancing time.
    RateReport evaluate_config(const Decoded& d) const;

private:
    void advance_users();

    EnvConfig cfg_;
    Scene scene_;
    ChannelSet channels_;
    ChannelSet static_channels_;
    std::vector<WaypointState> walkers_;  // reflection users first
    RngStream rng_;
};

}  // namespace starris
