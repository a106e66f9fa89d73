#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mtsim {

inline constexpr double kOutOfPlane = std::numeric_limits<double>::infinity();

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

inline Vec2 normalized(Vec2 a) {
    const double n = norm(a);
    if (n <= 0.0) throw std::invalid_argument("cannot normalize a zero vector");
    return {a.x / n, a.y / n};
}

/// Drone state vector [X, Y, Z, psi]; psi is the heading in degrees, kept in [0, 360).
struct Pose {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double psi = 0.0;

    Vec2 position() const { return {x, y}; }
};

inline double normalize_heading(double degrees) {
    double d = std::fmod(degrees, 360.0);
    if (d < 0.0) d += 360.0;
    return d == 360.0 ? 0.0 : d;
}

inline double heading_degrees(Vec2 v) {
    return normalize_heading(std::atan2(v.y, v.x) * 180.0 / M_PI);
}

struct CircleFootprint {
    Vec2 center;
    double radius = 0.0;
};

/// Convex polygon, vertices counter-clockwise.
struct PolygonFootprint {
    std::vector<Vec2> vertices;
};

using Footprint = std::variant<CircleFootprint, PolygonFootprint>;

struct HeightInterval {
    double z_min = 0.0;
    double z_max = 0.0;
    bool contains(double z) const { return z >= z_min && z <= z_max; }
};

/// Vertical prism: a 2D footprint extruded over a height interval.
struct Obstacle {
    std::string id;
    Footprint footprint;
    HeightInterval height;
};

struct Pad {
    std::string name;
    Vec2 position;
    std::string kind;  // "start", "destination", or empty
};

struct Rect {
    Vec2 min;
    Vec2 max;
    bool contains(Vec2 p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }
};

struct Ray {
    Vec2 origin;
    Vec2 direction;  // unit norm
};

inline double polygon_signed_area(const std::vector<Vec2>& vs) {
    double a = 0.0;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const Vec2& p = vs[i];
        const Vec2& q = vs[(i + 1) % vs.size()];
        a += cross(p, q);
    }
    return 0.5 * a;
}

inline void validate_footprint(const Footprint& fp, const std::string& id) {
    if (const auto* circle = std::get_if<CircleFootprint>(&fp)) {
        if (!(circle->radius > 0.0))
            throw std::invalid_argument("obstacle '" + id + "': circle radius must be > 0");
        return;
    }
    const auto& vs = std::get<PolygonFootprint>(fp).vertices;
    if (vs.size() < 3)
        throw std::invalid_argument("obstacle '" + id + "': polygon needs at least 3 vertices");
    if (!(polygon_signed_area(vs) > 1e-9))
        throw std::invalid_argument("obstacle '" + id +
                                    "': polygon must be counter-clockwise with area > 0");
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const Vec2 e1 = vs[(i + 1) % vs.size()] - vs[i];
        const Vec2 e2 = vs[(i + 2) % vs.size()] - vs[(i + 1) % vs.size()];
        if (cross(e1, e2) < -1e-12)
            throw std::invalid_argument("obstacle '" + id + "': polygon must be convex");
    }
}

inline void validate_obstacle(const Obstacle& o) {
    validate_footprint(o.footprint, o.id);
    if (!(o.height.z_min < o.height.z_max))
        throw std::invalid_argument("obstacle '" + o.id + "': height interval needs z_min < z_max");
}

inline bool footprint_contains(const Footprint& fp, Vec2 p) {
    if (const auto* circle = std::get_if<CircleFootprint>(&fp))
        return distance(p, circle->center) <= circle->radius;
    const auto& vs = std::get<PolygonFootprint>(fp).vertices;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const Vec2 a = vs[i];
        const Vec2 b = vs[(i + 1) % vs.size()];
        if (cross(b - a, p - a) < -1e-9) return false;
    }
    return true;
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 <= 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

/// Distance from p to the footprint boundary in the horizontal plane; 0 on or inside.
inline double footprint_boundary_distance(const Footprint& fp, Vec2 p) {
    if (const auto* circle = std::get_if<CircleFootprint>(&fp))
        return std::max(0.0, distance(p, circle->center) - circle->radius);
    if (footprint_contains(fp, p)) return 0.0;
    const auto& vs = std::get<PolygonFootprint>(fp).vertices;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vs.size(); ++i)
        best = std::min(best, point_segment_distance(p, vs[i], vs[(i + 1) % vs.size()]));
    return best;
}

/// First intersection parameter of a ray with a circle; +inf if it misses,
/// 0 if the origin is on or inside the circle.
inline double ray_circle_intersection(const Ray& ray, Vec2 center, double radius) {
    const Vec2 m = ray.origin - center;
    const double c = dot(m, m) - radius * radius;
    if (c <= 0.0) return 0.0;
    const double b = dot(m, ray.direction);
    const double disc = b * b - c;
    if (disc < 0.0) return std::numeric_limits<double>::infinity();
    const double t = -b - std::sqrt(disc);
    return t >= 0.0 ? t : std::numeric_limits<double>::infinity();
}

inline double ray_footprint_intersection(const Ray& ray, const Footprint& fp) {
    if (const auto* circle = std::get_if<CircleFootprint>(&fp))
        return ray_circle_intersection(ray, circle->center, circle->radius);
    if (footprint_contains(fp, ray.origin)) return 0.0;
    const auto& vs = std::get<PolygonFootprint>(fp).vertices;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const Vec2 a = vs[i];
        const Vec2 e = vs[(i + 1) % vs.size()] - vs[i];
        const double denom = cross(ray.direction, e);
        if (std::abs(denom) < 1e-15) continue;  // parallel; neighbours cover shared vertices
        const Vec2 ao = a - ray.origin;
        const double t = cross(ao, e) / denom;
        const double s = cross(ao, ray.direction) / denom;
        if (t >= 0.0 && s >= -1e-12 && s <= 1.0 + 1e-12) best = std::min(best, t);
    }
    return best;
}

struct WorldModel {
    std::vector<Obstacle> obstacles;
    std::vector<Pad> pads;
    Rect bounds;

    const Pad* find_pad(const std::string& name) const {
        for (const auto& p : pads)
            if (p.name == name) return &p;
        return nullptr;
    }
};

inline void validate_world(const WorldModel& world) {
    if (!(world.bounds.min.x < world.bounds.max.x && world.bounds.min.y < world.bounds.max.y))
        throw std::invalid_argument("world bounds must have min < max");
    std::vector<std::string> seen;
    for (const auto& o : world.obstacles) {
        validate_obstacle(o);
        if (std::find(seen.begin(), seen.end(), o.id) != seen.end())
            throw std::invalid_argument("duplicate obstacle id '" + o.id + "'");
        seen.push_back(o.id);
        if (const auto* circle = std::get_if<CircleFootprint>(&o.footprint)) {
            const Rect hull{{circle->center.x - circle->radius, circle->center.y - circle->radius},
                            {circle->center.x + circle->radius, circle->center.y + circle->radius}};
            if (!world.bounds.contains(hull.min) || !world.bounds.contains(hull.max))
                throw std::invalid_argument("obstacle '" + o.id + "' lies outside world bounds");
        } else {
            for (const Vec2 v : std::get<PolygonFootprint>(o.footprint).vertices)
                if (!world.bounds.contains(v))
                    throw std::invalid_argument("obstacle '" + o.id + "' lies outside world bounds");
        }
    }
    seen.clear();
    for (const auto& p : world.pads) {
        if (p.name.empty()) throw std::invalid_argument("pad names must be non-empty");
        if (std::find(seen.begin(), seen.end(), p.name) != seen.end())
            throw std::invalid_argument("duplicate pad name '" + p.name + "'");
        seen.push_back(p.name);
        if (!world.bounds.contains(p.position))
            throw std::invalid_argument("pad '" + p.name + "' lies outside world bounds");
    }
}

/// Distance along the ray to the nearest obstacle spanning the query altitude,
/// clamped to max_range. Obstacles whose height interval excludes the altitude
/// are invisible; that is the sensor's two-dimensionality.
inline double ray_cast(const Ray& ray, const WorldModel& world, double altitude, double max_range) {
    if (!(max_range > 0.0)) throw std::invalid_argument("ray_cast: max_range must be > 0");
    double best = max_range;
    for (const auto& o : world.obstacles) {
        if (!o.height.contains(altitude)) continue;
        best = std::min(best, ray_footprint_intersection(ray, o.footprint));
    }
    return std::min(best, max_range);
}

/// Horizontal-plane distance from the pose to the obstacle's footprint boundary
/// (0 on or inside); +inf when the obstacle does not span the pose's altitude.
inline double min_obstacle_distance(const Pose& p, const Obstacle& obstacle) {
    if (!obstacle.height.contains(p.z)) return kOutOfPlane;
    return footprint_boundary_distance(obstacle.footprint, p.position());
}

inline double shortest_path_length(Vec2 a, Vec2 b) { return distance(a, b); }

}  // namespace mtsim
