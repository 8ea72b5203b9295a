#include "starris/geometry.hpp"

#include <cmath>

#include "starris/errors.hpp"

namespace starris {

double distance(const Position3D& a, const Position3D& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

Bounds2D Bounds2D::square(const Position3D& center, double side) {
    if (!(side > 0.0)) throw DomainError("Bounds2D::square: side must be positive");
    const double h = side / 2.0;
    return {center.x - h, center.x + h, center.y - h, center.y + h};
}

Position3D uniform_in(const Bounds2D& box, double z, RngStream& rng) {
    const double x = rng.uniform(box.x_min, box.x_max);
    const double y = rng.uniform(box.y_min, box.y_max);
    return {x, y, z};
}

WaypointState rwp_step(const WaypointState& state, RngStream& rng) {
    WaypointState next = state;
    const double remaining = distance(state.current, state.target);
    if (remaining <= state.speed) {
        next.current = state.target;
        next.target = uniform_in(state.bounds, state.current.z, rng);
        return next;
    }
    const double f = state.speed / remaining;
    next.current.x = state.current.x + f * (state.target.x - state.current.x);
    next.current.y = state.current.y + f * (state.target.y - state.current.y);
    next.current.z = state.current.z + f * (state.target.z - state.current.z);
    return next;
}

double radial_speed(const Position3D& prev, const Position3D& curr, const Position3D& anchor) {
    return distance(prev, anchor) - distance(curr, anchor);
}

double doppler_shift(double v_radial, double f_c) { return f_c * v_radial / kSpeedOfLight; }

}  // namespace starris
