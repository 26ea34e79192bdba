#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "seqbit/core.hpp"
#include "seqbit/rng.hpp"

namespace seqbit {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2() = default;
    Point2(double x_, double y_) : x(x_), y(y_) {}

    Point2 operator+(const Point2& r) const { return {x + r.x, y + r.y}; }
    Point2 operator-(const Point2& r) const { return {x - r.x, y - r.y}; }
    Point2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Point2& r) const { return x * r.x + y * r.y; }
    double cross(const Point2& r) const { return x * r.y - y * r.x; }
    double norm() const { return std::hypot(x, y); }
    double norm_sq() const { return x * x + y * y; }
};

inline double dist(const Point2& a, const Point2& b) { return (a - b).norm(); }

/// Line segment; a == b degenerates to a point and is allowed.
struct Segment2 {
    Point2 a;
    Point2 b;
};

/// Circular footprint, radius > 0.
struct Disc {
    Point2 center;
    double radius = 0.0;
};

/// Axis-aligned rectangle given by center and positive half extents.
struct AxisRect {
    Point2 center;
    double half_width = 0.0;
    double half_height = 0.0;

    double xmin() const { return center.x - half_width; }
    double xmax() const { return center.x + half_width; }
    double ymin() const { return center.y - half_height; }
    double ymax() const { return center.y + half_height; }

    bool contains(const Point2& p) const {
        return p.x >= xmin() && p.x <= xmax() && p.y >= ymin() && p.y <= ymax();
    }

    /// True if r lies entirely inside this rectangle.
    bool contains_rect(const AxisRect& r) const {
        return r.xmin() >= xmin() && r.xmax() <= xmax() &&
               r.ymin() >= ymin() && r.ymax() <= ymax();
    }
};

/// Euclidean distance from p to the closed rectangle (0 inside).
inline double dist_point_rect(const Point2& p, const AxisRect& r) {
    const double dx = std::max({r.xmin() - p.x, 0.0, p.x - r.xmax()});
    const double dy = std::max({r.ymin() - p.y, 0.0, p.y - r.ymax()});
    return std::hypot(dx, dy);
}

/// Distance from p to the nearest point of segment s.
inline double dist_segment_point(const Segment2& s, const Point2& p) {
    const Point2 d = s.b - s.a;
    const double len_sq = d.norm_sq();
    if (len_sq <= 0.0) return dist(s.a, p);
    double t = (p - s.a).dot(d) / len_sq;
    t = clamp(t, 0.0, 1.0);
    return dist(s.a + d * t, p);
}

namespace detail {

/// Parameter interval [t0, t1] of s clipped to the closed rectangle
/// (Liang-Barsky). Returns false if the segment misses the rectangle.
inline bool clip_segment_rect(const Segment2& s, const AxisRect& r, double& t0, double& t1) {
    t0 = 0.0;
    t1 = 1.0;
    const double dx = s.b.x - s.a.x;
    const double dy = s.b.y - s.a.y;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {s.a.x - r.xmin(), r.xmax() - s.a.x, s.a.y - r.ymin(), r.ymax() - s.a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;
        } else {
            const double t = q[i] / p[i];
            if (p[i] < 0.0) {
                if (t > t1) return false;
                if (t > t0) t0 = t;
            } else {
                if (t < t0) return false;
                if (t < t1) t1 = t;
            }
        }
    }
    return true;
}

} // namespace detail

/// Minimum distance between segment s and the closed rectangle r (0 if they touch
/// or s enters r).
inline double dist_segment_rect(const Segment2& s, const AxisRect& r) {
    double t0, t1;
    if (detail::clip_segment_rect(s, r, t0, t1)) return 0.0;
    // Disjoint: min over the four rectangle corners vs segment and the two
    // segment endpoints vs rectangle. (For axis rects the corner/endpoint
    // distances cover edge-to-edge minima as well, since a non-intersecting
    // closest pair involves a vertex of one shape.)
    const Point2 c[4] = {{r.xmin(), r.ymin()}, {r.xmax(), r.ymin()}, {r.xmax(), r.ymax()}, {r.xmin(), r.ymax()}};
    double best = std::min(dist_point_rect(s.a, r), dist_point_rect(s.b, r));
    for (const auto& corner : c) best = std::min(best, dist_segment_point(s, corner));
    return best;
}

/// True iff s comes within `inflate` of r, i.e. s intersects r grown by
/// `inflate` with rounded corners. inflate >= 0.
inline bool segment_intersects_rect(const Segment2& s, const AxisRect& r, double inflate) {
    return dist_segment_rect(s, r) <= inflate;
}

/// Uniform point inside an axis-aligned rectangle.
inline Point2 sample_in_rect(const AxisRect& r, Rng& rng) {
    const double x = rng.uniform(r.xmin(), r.xmax());
    const double y = rng.uniform(r.ymin(), r.ymax());
    return {x, y};
}

/// Draw a point from the informed set: uniform over the ellipse of points p with
/// |p-start| + |p-goal| <= c_best. With c_best infinite, uniform over `bounds`.
/// Implemented as a uniform unit-disc draw mapped through the ellipse transform,
/// so each sample costs exactly two RNG draws.
inline Point2 sample_informed(const Point2& start, const Point2& goal, double c_best,
                              const AxisRect& bounds, Rng& rng) {
    if (std::isinf(c_best)) return sample_in_rect(bounds, rng);

    const double c_min = dist(start, goal);
    if (c_best < c_min - 1e-12)
        throw std::invalid_argument("sample_informed: c_best below start-goal distance (empty informed set)");
    if (c_best < c_min) c_best = c_min;

    const double ang = 2.0 * M_PI * rng.uniform01();
    const double rad = std::sqrt(rng.uniform01());
    const double bx = rad * std::cos(ang);
    const double by = rad * std::sin(ang);

    const double a = 0.5 * c_best;
    const double b = 0.5 * std::sqrt(std::max(0.0, c_best * c_best - c_min * c_min));
    const double phi = std::atan2(goal.y - start.y, goal.x - start.x);
    const double cphi = std::cos(phi), sphi = std::sin(phi);
    const Point2 mid{0.5 * (start.x + goal.x), 0.5 * (start.y + goal.y)};
    return {mid.x + cphi * a * bx - sphi * b * by,
            mid.y + sphi * a * bx + cphi * b * by};
}

/// Lebesgue measure of the informed ellipse for transverse cost c_best and
/// focal distance c_min. Infinite c_best yields +inf.
inline double informed_measure(double c_best, double c_min) {
    if (std::isinf(c_best)) return std::numeric_limits<double>::infinity();
    const double a = 0.5 * c_best;
    const double b = 0.5 * std::sqrt(std::max(0.0, c_best * c_best - c_min * c_min));
    return M_PI * a * b;
}

} // namespace seqbit
