#pragma once

#include <cmath>
#include <vector>

#include "seqbit/core.hpp"
#include "seqbit/geometry.hpp"

namespace seqbit {

/// Constant twist followed by a dynamic obstacle for its whole lifetime.
struct ObstacleMotion {
    double v = 0.0;      ///< m/s, >= 0
    double omega = 0.0;  ///< rad/s, signed
};

struct DynamicObstacle {
    double radius = 0.0;
    Pose2D initial_pose;
    ObstacleMotion motion;
};

/// Closed-form constant-twist flow: straight line for |omega| ~ 0, otherwise a
/// circular arc of radius v/|omega|.
inline Pose2D obstacle_pose_at(const DynamicObstacle& o, double t) {
    const double v = o.motion.v;
    const double w = o.motion.omega;
    const Pose2D& p0 = o.initial_pose;
    if (std::abs(w) < 1e-9) {
        return {p0.x + v * t * std::cos(p0.theta),
                p0.y + v * t * std::sin(p0.theta),
                p0.theta};
    }
    const double th = p0.theta + w * t;
    const double r = v / w;
    return {p0.x + r * (std::sin(th) - std::sin(p0.theta)),
            p0.y - r * (std::cos(th) - std::cos(p0.theta)),
            th};
}

/// Same flow for the robot plant model.
inline Pose2D integrate_twist(const Pose2D& p0, const Twist& u, double dt) {
    DynamicObstacle tmp;
    tmp.initial_pose = p0;
    tmp.motion = {u.v, u.omega};
    return obstacle_pose_at(tmp, dt);
}

/// Environment: arena bounds, static rectangles, scripted dynamic obstacles and
/// the mutable virtual-obstacle overlay appended by the replanner.
struct World {
    AxisRect bounds;
    std::vector<AxisRect> statics;
    std::vector<DynamicObstacle> dynamics;
    std::vector<AxisRect> virtuals;  ///< overlay, initially empty
};

/// Time-frozen view of a World. Immutable once constructed; planners treat
/// statics + virtuals as the obstacle set, the frozen dynamics serve rendering
/// and the velocity-space baseline.
class SceneSnapshot {
public:
    SceneSnapshot(const World& w, double t, bool freeze_dynamics = true)
        : bounds_(w.bounds), statics_(w.statics), virtuals_(w.virtuals), time_(t) {
        if (freeze_dynamics) {
            frozen_.reserve(w.dynamics.size());
            for (const auto& d : w.dynamics) {
                const Pose2D p = obstacle_pose_at(d, t);
                frozen_.push_back({{p.x, p.y}, d.radius});
            }
        }
    }

    const AxisRect& bounds() const { return bounds_; }
    const std::vector<AxisRect>& statics() const { return statics_; }
    const std::vector<AxisRect>& virtuals() const { return virtuals_; }
    const std::vector<Disc>& frozen_dynamics() const { return frozen_; }
    double time() const { return time_; }

    /// Distance from p to the nearest planning obstacle (statics + virtuals).
    double clearance(const Point2& p) const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& r : statics_) best = std::min(best, dist_point_rect(p, r));
        for (const auto& r : virtuals_) best = std::min(best, dist_point_rect(p, r));
        return best;
    }

    /// True if a point robot inflated by `radius` is collision free at p and
    /// inside the arena.
    bool point_free(const Point2& p, double radius) const {
        if (p.x < bounds_.xmin() + radius || p.x > bounds_.xmax() - radius ||
            p.y < bounds_.ymin() + radius || p.y > bounds_.ymax() - radius)
            return false;
        return clearance(p) > radius;
    }

    /// True if the segment keeps distance > radius from every planning obstacle
    /// and stays inside the arena (endpoints suffice: the deflated arena is convex).
    bool segment_free(const Segment2& s, double radius) const {
        if (!point_free(s.a, radius) || !point_free(s.b, radius)) return false;
        for (const auto& r : statics_)
            if (segment_intersects_rect(s, r, radius)) return false;
        for (const auto& r : virtuals_)
            if (segment_intersects_rect(s, r, radius)) return false;
        return true;
    }

private:
    AxisRect bounds_;
    std::vector<AxisRect> statics_;
    std::vector<AxisRect> virtuals_;
    std::vector<Disc> frozen_;
    double time_ = 0.0;
};

inline SceneSnapshot snapshot(const World& w, double t, bool freeze_dynamics = true) {
    return SceneSnapshot(w, t, freeze_dynamics);
}

} // namespace seqbit
