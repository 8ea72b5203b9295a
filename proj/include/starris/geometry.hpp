#pragma once

#include "starris/numerics.hpp"

namespace starris {

struct Position3D {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Position3D&, const Position3D&) = default;
};

double distance(const Position3D& a, const Position3D& b);

// Axis-aligned box in the horizontal plane; z is held fixed by the mobility model.
struct Bounds2D {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;

    bool contains(const Position3D& p) const {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
    }
    // Square of side `side` centred on `center`.
    static Bounds2D square(const Position3D& center, double side);
};

Position3D uniform_in(const Bounds2D& box, double z, RngStream& rng);

/// Random-waypoint mobility state (speed in metres per time step, no pauses).
struct WaypointState {
    Position3D current;
    Position3D target;
    double speed = 1.0;
    Bounds2D bounds;
};

// Advance by exactly `speed` toward the target, or land on it and draw a new one.
WaypointState rwp_step(const WaypointState& state, RngStream& rng);

// Rate of decrease of distance to `anchor` over one step; positive when approaching.
double radial_speed(const Position3D& prev, const Position3D& curr, const Position3D& anchor);

// Narrowband Doppler: f_c * v / c.
double doppler_shift(double v_radial, double f_c);

}  // namespace starris
