#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mtsim/geometry.hpp"

namespace mtsim {

/// Drones are sensed (and collision-checked) as vertical cylinders of this half-height.
inline constexpr double kBodyHalfHeight = 0.5;

struct LidarConfig {
    int ray_count = 360;
    double min_range = 0.35;
    double max_range = 30.0;
};

inline void validate_lidar_config(const LidarConfig& cfg) {
    if (cfg.ray_count < 8) throw std::invalid_argument("lidar ray_count must be >= 8");
    if (!(cfg.min_range > 0.0)) throw std::invalid_argument("lidar min_range must be > 0");
    if (!(cfg.max_range > cfg.min_range))
        throw std::invalid_argument("lidar max_range must exceed min_range");
}

/// Ray 0 points along world +x; rays are spaced uniformly counter-clockwise.
struct LidarScan {
    std::vector<double> ranges;

    int ray_count() const { return static_cast<int>(ranges.size()); }

    static double ray_angle(int index, int count) {
        return 2.0 * M_PI * static_cast<double>(index) / static_cast<double>(count);
    }
    Vec2 ray_direction(int index) const {
        const double a = ray_angle(index, ray_count());
        return {std::cos(a), std::sin(a)};
    }
};

struct OtherDrone {
    Pose pose;
    double body_radius = 0.5;
};

/// One full 360-degree sweep from pose p against the static world and the other
/// drones. Readings are clamped into [min_range, max_range]; the dead zone below
/// min_range clamps up rather than dropping the ray so the array stays dense.
inline LidarScan scan(const Pose& p, const WorldModel& world,
                      std::span<const OtherDrone> other_drones, const LidarConfig& config) {
    validate_lidar_config(config);
    LidarScan out;
    out.ranges.resize(static_cast<std::size_t>(config.ray_count));
    for (int i = 0; i < config.ray_count; ++i) {
        const double a = LidarScan::ray_angle(i, config.ray_count);
        const Ray ray{{p.x, p.y}, {std::cos(a), std::sin(a)}};
        double r = ray_cast(ray, world, p.z, config.max_range);
        for (const auto& other : other_drones) {
            if (std::abs(p.z - other.pose.z) > kBodyHalfHeight) continue;
            r = std::min(r, ray_circle_intersection(ray, other.pose.position(), other.body_radius));
        }
        out.ranges[static_cast<std::size_t>(i)] =
            std::clamp(r, config.min_range, config.max_range);
    }
    return out;
}

/// Minimum reading and its ray index; ties break to the lowest index.
inline std::pair<double, int> nearest_reading(const LidarScan& s) {
    if (s.ranges.empty()) throw std::invalid_argument("nearest_reading: empty scan");
    int best = 0;
    for (int i = 1; i < s.ray_count(); ++i)
        if (s.ranges[static_cast<std::size_t>(i)] < s.ranges[static_cast<std::size_t>(best)])
            best = i;
    return {s.ranges[static_cast<std::size_t>(best)], best};
}

}  // namespace mtsim
