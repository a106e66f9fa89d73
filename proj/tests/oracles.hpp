#pragma once

// Test-only oracles, kept independent of the implementation paths they check.

#include <random>

#include "mtsim/potential_field.hpp"

namespace mtsim::test {

/// Brute-force ray cast: walk the ray in fixed steps and report the first
/// sample point lying inside any obstacle that spans the altitude.
inline double marching_ray_cast(const Ray& ray, const WorldModel& world, double altitude,
                                double max_range, double step = 0.001) {
    const long n = static_cast<long>(max_range / step);
    for (long k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) * step;
        const Vec2 p = ray.origin + ray.direction * t;
        for (const auto& o : world.obstacles) {
            if (!o.height.contains(altitude)) continue;
            if (footprint_contains(o.footprint, p)) return std::min(t, max_range);
        }
    }
    return max_range;
}

/// Dense boundary sampling for the minimum footprint distance.
inline double sampled_boundary_distance(const Footprint& fp, Vec2 p, int samples = 20000) {
    if (footprint_contains(fp, p)) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    if (const auto* circle = std::get_if<CircleFootprint>(&fp)) {
        for (int i = 0; i < samples; ++i) {
            const double a = 2.0 * M_PI * i / samples;
            const Vec2 q{circle->center.x + circle->radius * std::cos(a),
                         circle->center.y + circle->radius * std::sin(a)};
            best = std::min(best, distance(p, q));
        }
        return best;
    }
    const auto& vs = std::get<PolygonFootprint>(fp).vertices;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const Vec2 a = vs[i];
        const Vec2 b = vs[(i + 1) % vs.size()];
        for (int k = 0; k <= samples / static_cast<int>(vs.size()); ++k) {
            const double t = static_cast<double>(k) / (samples / static_cast<int>(vs.size()));
            best = std::min(best, distance(p, a + (b - a) * t));
        }
    }
    return best;
}

/// Central-difference gradient of the summed per-ray potential, with each
/// reading frozen as a point obstacle at its hit location.
inline ForceVector finite_difference_force(const LidarScan& scan, const AvoidanceConfig& config,
                                           double step = 1e-4) {
    std::vector<Vec2> hits;
    hits.reserve(scan.ranges.size());
    for (int i = 0; i < scan.ray_count(); ++i)
        hits.push_back(scan.ray_direction(i) * scan.ranges[static_cast<std::size_t>(i)]);

    const auto potential_at = [&](Vec2 p) {
        double u = 0.0;
        for (const Vec2& hit : hits) u += repulsive_potential(distance(p, hit), config.k_obst, config.d0);
        return u;
    };
    const double ux = (potential_at({step, 0.0}) - potential_at({-step, 0.0})) / (2.0 * step);
    const double uy = (potential_at({0.0, step}) - potential_at({0.0, -step})) / (2.0 * step);
    return {-ux, -uy};
}

/// Random convex polygon: vertices on a circle at sorted angles.
inline PolygonFootprint random_convex_polygon(std::mt19937_64& rng, Vec2 center, double radius) {
    std::uniform_int_distribution<int> n_dist(3, 7);
    std::uniform_real_distribution<double> a_dist(0.0, 2.0 * M_PI);
    const int n = n_dist(rng);
    std::vector<double> angles(static_cast<std::size_t>(n));
    for (auto& a : angles) a = a_dist(rng);
    std::sort(angles.begin(), angles.end());
    // Degenerate (near-collinear) vertex sets are re-rolled by the caller via validation.
    PolygonFootprint fp;
    for (double a : angles)
        fp.vertices.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
    return fp;
}

inline WorldModel random_world(std::mt19937_64& rng, double query_altitude) {
    std::uniform_int_distribution<int> count_dist(1, 5);
    std::uniform_real_distribution<double> pos_dist(-20.0, 20.0);
    std::uniform_real_distribution<double> radius_dist(0.5, 5.0);
    std::uniform_real_distribution<double> z_dist(0.0, 6.0);
    std::bernoulli_distribution in_plane(0.7);
    std::bernoulli_distribution circle(0.5);

    WorldModel world;
    world.bounds = {{-60.0, -60.0}, {60.0, 60.0}};
    const int n = count_dist(rng);
    for (int i = 0; i < n; ++i) {
        Obstacle o;
        o.id = "obst" + std::to_string(i);
        const Vec2 c{pos_dist(rng), pos_dist(rng)};
        const double r = radius_dist(rng);
        if (circle(rng)) {
            o.footprint = CircleFootprint{c, r};
        } else {
            PolygonFootprint fp = random_convex_polygon(rng, c, r);
            try {
                validate_footprint(fp, o.id);
            } catch (const std::invalid_argument&) {
                o.footprint = CircleFootprint{c, r};  // re-roll degenerate polygons as circles
                fp.vertices.clear();
            }
            if (!fp.vertices.empty()) o.footprint = fp;
        }
        if (in_plane(rng)) {
            o.height = {0.0, query_altitude + z_dist(rng) + 0.1};
        } else {
            const double lo = query_altitude + 0.5 + z_dist(rng);
            o.height = {lo, lo + 1.0 + z_dist(rng)};
        }
        world.obstacles.push_back(std::move(o));
    }
    return world;
}

/// Ray with an origin outside every footprint, pointed in a random direction.
inline Ray random_outside_ray(std::mt19937_64& rng, const WorldModel& world) {
    std::uniform_real_distribution<double> pos_dist(-25.0, 25.0);
    std::uniform_real_distribution<double> a_dist(0.0, 2.0 * M_PI);
    while (true) {
        const Vec2 origin{pos_dist(rng), pos_dist(rng)};
        bool inside = false;
        for (const auto& o : world.obstacles)
            if (footprint_contains(o.footprint, origin)) inside = true;
        if (inside) continue;
        const double a = a_dist(rng);
        return {origin, {std::cos(a), std::sin(a)}};
    }
}

inline LidarScan random_scan(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_dist(8, 360);
    std::uniform_real_distribution<double> r_dist(0.36, 30.0);
    LidarScan scan;
    const int n = n_dist(rng);
    scan.ranges.resize(static_cast<std::size_t>(n));
    for (auto& r : scan.ranges) r = r_dist(rng);
    return scan;
}

}  // namespace mtsim::test
