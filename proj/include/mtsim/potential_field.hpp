#pragma once

#include <cmath>
#include <stdexcept>

#include "mtsim/lidar.hpp"

namespace mtsim {

inline constexpr double kSteeringEpsilon = 1e-9;

struct AvoidanceConfig {
    double k_obst = 1.0;       // repulsion scaling constant
    double d0 = 10.0;          // object influence threshold, metres
    double cruise_speed = 1.0; // metres/second
    bool suspend_pursuit_during_avoidance = true;
};

struct ForceVector {
    double fx = 0.0;
    double fy = 0.0;
};

struct VelocityCommand {
    double vx = 0.0;
    double vy = 0.0;
    bool avoidance_active = false;
};

/// Repulsive potential of a single obstacle at distance d:
/// 0.5 * k * (1/d - 1/d0)^2 inside the influence threshold, 0 at or beyond it.
inline double repulsive_potential(double d, double k, double d0) {
    if (!(d > 0.0)) throw std::domain_error("repulsive_potential: distance must be > 0");
    if (d >= d0) return 0.0;
    const double diff = 1.0 / d - 1.0 / d0;
    return 0.5 * k * diff * diff;
}

/// Negative gradient of the summed per-ray potential, treating each reading
/// below d0 as a point obstacle along its ray. Each contributing ray adds
/// magnitude k * (1/d - 1/d0) / d^2 pointing opposite the ray direction.
inline ForceVector repulsive_force(const LidarScan& scan, const AvoidanceConfig& config) {
    ForceVector f;
    const int n = scan.ray_count();
    for (int i = 0; i < n; ++i) {
        const double d = scan.ranges[static_cast<std::size_t>(i)];
        if (d >= config.d0) continue;
        const double magnitude = config.k_obst * (1.0 / d - 1.0 / config.d0) / (d * d);
        const Vec2 dir = scan.ray_direction(i);
        f.fx -= magnitude * dir.x;
        f.fy -= magnitude * dir.y;
    }
    return f;
}

/// Constant-magnitude attraction: the unit vector toward the waypoint.
inline ForceVector attractive_force(const Pose& p, Vec2 waypoint) {
    const Vec2 delta = waypoint - p.position();
    const double n = norm(delta);
    if (n < kSteeringEpsilon) return {0.0, 0.0};
    return {delta.x / n, delta.y / n};
}

/// Combined steering command at full cruise speed (or stillness when forces
/// cancel). While any reading is inside d0 and suspension is enabled, waypoint
/// pursuit is dropped and the command follows the repulsive force alone.
inline VelocityCommand command(const Pose& p, Vec2 waypoint, const LidarScan& scan,
                               const AvoidanceConfig& config) {
    VelocityCommand cmd;
    cmd.avoidance_active = nearest_reading(scan).first < config.d0;

    const ForceVector rep = repulsive_force(scan, config);
    ForceVector steering = rep;
    if (!(cmd.avoidance_active && config.suspend_pursuit_during_avoidance)) {
        const ForceVector att = attractive_force(p, waypoint);
        steering.fx += att.fx;
        steering.fy += att.fy;
    }

    const double n = std::hypot(steering.fx, steering.fy);
    if (n < kSteeringEpsilon) return cmd;  // balanced forces: hold position this tick
    cmd.vx = config.cruise_speed * steering.fx / n;
    cmd.vy = config.cruise_speed * steering.fy / n;
    return cmd;
}

}  // namespace mtsim
