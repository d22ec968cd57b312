#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace haznav {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
    double x{0.0};
    double y{0.0};

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2& o) const = default;

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double squared_norm() const { return x * x + y * y; }
};

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    if (a > kPi) a -= 2.0 * kPi;
    return a;
}

/// Planar pose: world position plus heading, heading kept in (-pi, pi].
struct Pose2D {
    double x{0.0};
    double y{0.0};
    double heading{0.0};

    Vec2 position() const { return {x, y}; }

    /// Maps a point from this pose's local frame into the world frame.
    Vec2 transform(const Vec2& local) const {
        const double c = std::cos(heading);
        const double s = std::sin(heading);
        return {x + c * local.x - s * local.y, y + s * local.x + c * local.y};
    }

    /// Composition: world_T_this * this_T_child.
    Pose2D compose(const Pose2D& child) const {
        const Vec2 p = transform({child.x, child.y});
        return {p.x, p.y, normalize_angle(heading + child.heading)};
    }
};

inline double distance_point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squared_norm();
    if (len2 == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

/// Distance along a ray (origin o, unit direction d) to segment ab.
/// Returns nullopt when the ray misses the segment.
inline std::optional<double> ray_segment_intersection(const Vec2& o, const Vec2& d,
                                                      const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double denom = d.cross(ab);
    if (std::abs(denom) < 1e-15) return std::nullopt;  // parallel
    const Vec2 ao = a - o;
    const double t = ao.cross(ab) / denom;   // distance along ray
    const double s = ao.cross(d) / denom;    // parameter on segment
    if (t < 0.0 || s < 0.0 || s > 1.0) return std::nullopt;
    return t;
}

/// Closed polygon, vertices in order (either winding).
struct Polygon {
    std::vector<Vec2> vertices;

    bool empty() const { return vertices.size() < 3; }

    bool contains(const Vec2& p) const {
        if (empty()) return false;
        bool inside = false;
        for (std::size_t i = 0, j = vertices.size() - 1; i < vertices.size(); j = i++) {
            const Vec2& vi = vertices[i];
            const Vec2& vj = vertices[j];
            if ((vi.y > p.y) != (vj.y > p.y) &&
                p.x < (vj.x - vi.x) * (p.y - vi.y) / (vj.y - vi.y) + vi.x) {
                inside = !inside;
            }
        }
        return inside;
    }

    double distance_to_boundary(const Vec2& p) const {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0, j = vertices.size() - 1; i < vertices.size(); j = i++) {
            best = std::min(best, distance_point_segment(p, vertices[j], vertices[i]));
        }
        return best;
    }

    /// Signed clearance for a disc: <= 0 means the disc of radius r at p overlaps.
    bool intersects_disc(const Vec2& p, double r) const {
        if (empty()) return false;
        if (contains(p)) return true;
        return distance_to_boundary(p) <= r;
    }

    /// Nearest hit distance of ray (o, d) against the polygon outline.
    std::optional<double> raycast(const Vec2& o, const Vec2& d) const {
        std::optional<double> best;
        for (std::size_t i = 0, j = vertices.size() - 1; i < vertices.size(); j = i++) {
            const auto t = ray_segment_intersection(o, d, vertices[j], vertices[i]);
            if (t && (!best || *t < *best)) best = t;
        }
        return best;
    }
};

inline Polygon make_rect(double cx, double cy, double width, double height) {
    const double hw = width / 2.0;
    const double hh = height / 2.0;
    return Polygon{{{cx - hw, cy - hh}, {cx + hw, cy - hh}, {cx + hw, cy + hh}, {cx - hw, cy + hh}}};
}

}  // namespace haznav
