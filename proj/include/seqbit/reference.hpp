#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "seqbit/core.hpp"
#include "seqbit/spline.hpp"

namespace seqbit {

struct TimedSample {
    double t = 0.0;
    Pose2D pose;
    Twist twist;
};

/// Timed reference motion: strictly increasing timestamps, every sample within
/// the robot limits it was generated for.
struct TimedTrajectory {
    std::vector<TimedSample> samples;

    bool empty() const { return samples.empty(); }
    double start_time() const { return samples.front().t; }
    double end_time() const { return samples.back().t; }
    double duration() const { return end_time() - start_time(); }

    /// Interpolated sample at time t, clamped to the trajectory's span.
    TimedSample at(double t) const {
        if (samples.empty()) throw std::logic_error("TimedTrajectory::at on empty trajectory");
        if (t <= samples.front().t) return samples.front();
        if (t >= samples.back().t) {
            TimedSample s = samples.back();
            s.twist = {0.0, 0.0};  // hold pose after the reference ends
            return s;
        }
        const auto it = std::upper_bound(samples.begin(), samples.end(), t,
                                         [](double v, const TimedSample& s) { return v < s.t; });
        const TimedSample& s1 = *it;
        const TimedSample& s0 = *(it - 1);
        const double w = (t - s0.t) / (s1.t - s0.t);
        TimedSample out;
        out.t = t;
        out.pose.x = s0.pose.x + w * (s1.pose.x - s0.pose.x);
        out.pose.y = s0.pose.y + w * (s1.pose.y - s0.pose.y);
        out.pose.theta = s0.pose.theta + w * wrap_angle(s1.pose.theta - s0.pose.theta);
        out.twist.v = s0.twist.v + w * (s1.twist.v - s0.twist.v);
        out.twist.omega = s0.twist.omega + w * (s1.twist.omega - s0.twist.omega);
        return out;
    }

    /// Robot position at time t.
    Point2 position_at(double t) const {
        const TimedSample s = at(t);
        return {s.pose.x, s.pose.y};
    }
};

/// Curvature-aware velocity profile along a spline path, sampled at dt.
///
/// v(s) is capped by v_max, by omega_max/|kappa| and by a curvature-rate term
/// that reserves angular-acceleration headroom; forward/backward passes enforce
/// the linear acceleration limit with rest at both ends. omega = kappa * v.
inline TimedTrajectory generate_reference(const SplinePath& path, const RobotLimits& limits,
                                          double dt, double t0 = 0.0) {
    if (!(dt > 0.0)) throw std::invalid_argument("generate_reference: dt must be > 0");
    const double L = path.total_length();

    const int n = std::max(400, static_cast<int>(std::ceil(L / 0.005)) + 1);
    const double ds = L / (n - 1);

    std::vector<double> kappa(n), s_of(n);
    for (int i = 0; i < n; ++i) {
        s_of[i] = ds * i;
        kappa[i] = path.curvature(s_of[i]);
    }
    std::vector<double> dkappa(n, 0.0);
    for (int i = 1; i + 1 < n; ++i) dkappa[i] = (kappa[i + 1] - kappa[i - 1]) / (2.0 * ds);
    if (n > 1) {
        dkappa[0] = (kappa[1] - kappa[0]) / ds;
        dkappa[n - 1] = (kappa[n - 1] - kappa[n - 2]) / ds;
    }

    // Angular-acceleration budget split: |d(kv)/dt| <= |k'| v^2 + |k| dv/dt.
    const double alpha_curv = 0.75 * limits.alpha_max;
    const double alpha_lin = 0.20 * limits.alpha_max;
    const double v_floor = 0.015;

    std::vector<double> cap(n), acc(n);
    for (int i = 0; i < n; ++i) {
        double c = limits.v_max;
        const double ak = std::abs(kappa[i]);
        if (ak > 1e-12) c = std::min(c, limits.omega_max / ak);
        const double adk = std::abs(dkappa[i]);
        if (adk > 1e-12) c = std::min(c, std::sqrt(alpha_curv / adk));
        cap[i] = std::max(c, v_floor);
        acc[i] = std::min(limits.a_max, alpha_lin / std::max(ak, 1e-9));
    }

    std::vector<double> v(n);
    v[0] = 0.0;
    for (int i = 1; i < n; ++i) {
        const double a = std::min(acc[i - 1], acc[i]);
        v[i] = std::min(cap[i], std::sqrt(v[i - 1] * v[i - 1] + 2.0 * a * ds));
    }
    v[n - 1] = 0.0;
    for (int i = n - 2; i >= 0; --i) {
        const double a = std::min(acc[i], acc[i + 1]);
        v[i] = std::min(v[i], std::sqrt(v[i + 1] * v[i + 1] + 2.0 * a * ds));
    }

    std::vector<double> tim(n);
    tim[0] = 0.0;
    for (int i = 1; i < n; ++i) {
        const double vbar = std::max(0.5 * (v[i - 1] + v[i]), 1e-6);
        tim[i] = tim[i - 1] + ds / vbar;
    }
    const double T = tim[n - 1];

    auto state_at = [&](double tq) {
        const auto it = std::upper_bound(tim.begin(), tim.end(), tq);
        int k = static_cast<int>(it - tim.begin()) - 1;
        if (k < 0) k = 0;
        if (k > n - 2) k = n - 2;
        const double w = (tq - tim[k]) / std::max(1e-12, tim[k + 1] - tim[k]);
        const double s = s_of[k] + w * ds;
        const double vv = v[k] + w * (v[k + 1] - v[k]);
        return std::pair<double, double>(s, vv);
    };

    TimedTrajectory traj;
    const int steps = static_cast<int>(std::floor(T / dt));
    traj.samples.reserve(steps + 2);
    for (int k = 0; k <= steps; ++k) {
        const double tq = k * dt;
        const auto [s, vv] = state_at(tq);
        const Point2 p = path.eval_at_length(s);
        const double th = path.heading(s);
        const double om = clamp(path.curvature(s) * vv, -limits.omega_max, limits.omega_max);
        traj.samples.push_back({t0 + tq, {p.x, p.y, th}, {vv, om}});
    }
    if (T - steps * dt > 1e-9) {
        const Point2 p = path.eval_at_length(L);
        traj.samples.push_back({t0 + T, {p.x, p.y, path.heading(L)}, {0.0, 0.0}});
    } else if (!traj.samples.empty()) {
        traj.samples.back().twist = {0.0, 0.0};
    }
    return traj;
}

/// Point-wise free-space predicate used when validating smoothed paths.
using PointFreeFn = std::function<bool(const Point2&)>;

namespace detail {

inline bool spline_collision_free(const SplinePath& sp, const PointFreeFn& free, double resolution) {
    const double L = sp.total_length();
    const int n = std::max(2, static_cast<int>(std::ceil(L / resolution)) + 1);
    for (int i = 0; i <= n; ++i) {
        if (!free(sp.eval_at_length(L * static_cast<double>(i) / n))) return false;
    }
    return true;
}

/// Polyline with circular fillets of radius <= r_corner at interior corners,
/// emitted as a dense point list.
inline std::vector<Point2> rounded_polyline(const std::vector<Point2>& wp, double r_corner) {
    const double step = 0.05;
    std::vector<Point2> out;
    out.push_back(wp.front());
    Point2 seg_start = wp.front();
    for (std::size_t i = 1; i + 1 < wp.size(); ++i) {
        const Point2 prev = wp[i - 1], cur = wp[i], next = wp[i + 1];
        const Point2 d1 = cur - prev, d2 = next - cur;
        const double l1 = d1.norm(), l2 = d2.norm();
        const Point2 u1 = d1 * (1.0 / l1), u2 = d2 * (1.0 / l2);
        const double turn = std::atan2(u1.cross(u2), u1.dot(u2));
        if (std::abs(turn) < 1e-6) continue;  // straight-through knot
        const double tan_half = std::tan(0.5 * std::abs(turn));
        double r = std::min(r_corner, 0.45 * std::min(l1, l2) / tan_half);
        const double t_off = r * tan_half;
        const Point2 a = cur - u1 * t_off;
        const Point2 b = cur + u2 * t_off;
        // straight run up to the fillet start
        const double run = dist(seg_start, a);
        const int nseg = std::max(1, static_cast<int>(std::ceil(run / (4.0 * step))));
        for (int k = 1; k <= nseg; ++k) out.push_back(seg_start + (a - seg_start) * (static_cast<double>(k) / nseg));
        // arc from a to b
        const double side = (turn > 0.0) ? 1.0 : -1.0;
        const Point2 n1{-u1.y * side, u1.x * side};
        const Point2 c = a + n1 * r;
        const double ang0 = std::atan2(a.y - c.y, a.x - c.x);
        const int narc = std::max(2, static_cast<int>(std::ceil(std::abs(turn) * r / step)));
        for (int k = 1; k <= narc; ++k) {
            const double ang = ang0 + turn * static_cast<double>(k) / narc;
            out.push_back({c.x + r * std::cos(ang), c.y + r * std::sin(ang)});
        }
        seg_start = b;
    }
    const double run = dist(seg_start, wp.back());
    const int nseg = std::max(1, static_cast<int>(std::ceil(run / (4.0 * step))));
    for (int k = 1; k <= nseg; ++k) out.push_back(seg_start + (wp.back() - seg_start) * (static_cast<double>(k) / nseg));
    // drop near-duplicates
    std::vector<Point2> dedup;
    dedup.push_back(out.front());
    for (const auto& p : out)
        if (dist(p, dedup.back()) > 1e-7) dedup.push_back(p);
    return dedup;
}

} // namespace detail

/// Smooth a planner polyline into a spline that is verified collision free.
///
/// The interpolating spline can graze obstacles the polyline cleared, so the
/// result is re-checked at `resolution`; on violation we retry with the
/// polyline filleted at decreasing corner radii (starting from the minimum
/// turning radius v_max/omega_max) and finally fall back to a dense rendering
/// of the polyline itself, whose clearance the planner already established.
inline SplinePath smooth_waypoints(const std::vector<Point2>& waypoints, const PointFreeFn& free,
                                   const RobotLimits& limits, double resolution) {
    std::vector<Point2> wp;
    wp.reserve(waypoints.size());
    for (const auto& p : waypoints)
        if (wp.empty() || dist(p, wp.back()) > 1e-9) wp.push_back(p);
    if (wp.size() < 2) throw std::invalid_argument("smooth_waypoints: need at least 2 distinct waypoints");

    SplinePath direct = SplinePath::fit(wp);
    if (wp.size() == 2 || detail::spline_collision_free(direct, free, resolution)) return direct;

    const double r_turn = limits.v_max / limits.omega_max;
    for (double r : {r_turn, 0.5 * r_turn, 0.25 * r_turn, 0.1 * r_turn}) {
        SplinePath sp = SplinePath::fit(detail::rounded_polyline(wp, r));
        if (detail::spline_collision_free(sp, free, resolution)) return sp;
    }
    return SplinePath::fit(detail::rounded_polyline(wp, 0.02));
}

} // namespace seqbit
