#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "seqbit/core.hpp"
#include "seqbit/control.hpp"
#include "seqbit/world.hpp"

namespace seqbit {

/// Discretized velocity window [0, v_max] x [-omega_max, omega_max] with a
/// forbidden mask (the velocity-obstacle region at the current instant).
struct VelocityGrid {
    int n_v = 41;
    int n_omega = 41;
    double v_max = 0.4;
    double omega_max = 0.4;
    std::vector<std::uint8_t> forbidden;

    void init(int nv, int nw, double vmax, double wmax) {
        n_v = nv;
        n_omega = nw;
        v_max = vmax;
        omega_max = wmax;
        forbidden.assign(static_cast<std::size_t>(nv) * nw, 0);
    }
    double v_at(int i) const { return v_max * static_cast<double>(i) / (n_v - 1); }
    double omega_at(int j) const {
        return -omega_max + 2.0 * omega_max * static_cast<double>(j) / (n_omega - 1);
    }
    bool is_forbidden(int i, int j) const { return forbidden[static_cast<std::size_t>(i) * n_omega + j] != 0; }
    void mark(int i, int j) { forbidden[static_cast<std::size_t>(i) * n_omega + j] = 1; }
    bool any_forbidden() const {
        for (auto f : forbidden)
            if (f) return true;
        return false;
    }
};

struct DovsConfig {
    double horizon = 8.0;        ///< s, lookahead of the constant-twist rollout
    double d_safe = 1.0;         ///< m, static obstacles beyond this are ignored
    Twist goal_twist{0.4, 0.0};  ///< set per step by dovs_step
    int n_v = 41;
    int n_omega = 41;
    double dt_check = 0.1;       ///< s, rollout stride
    double margin = 0.25;        ///< m, clearance buffer in the rollout overlap test
    double goal_bearing_gain = 1.0;
};

/// Forbidden-velocity mask at the current instant: a grid cell is forbidden iff
/// holding that twist for the horizon overlaps a dynamic obstacle on its known
/// constant-twist motion, or an *admitted* static obstacle. Statics (and the
/// arena walls) are admitted only while currently within d_safe of the robot;
/// anything farther is invisible to the mask even when the rollout would reach
/// it, which is the documented hazard of this rule.
inline VelocityGrid forbidden_velocities(const RobotState& state, double t_now,
                                         const std::vector<DynamicObstacle>& dynamics,
                                         const std::vector<AxisRect>& statics,
                                         const AxisRect& bounds, double r_robot,
                                         const DovsConfig& cfg, const RobotLimits& limits) {
    VelocityGrid grid;
    grid.init(cfg.n_v, cfg.n_omega, limits.v_max, limits.omega_max);

    const Point2 pos{state.pose.x, state.pose.y};
    std::vector<const AxisRect*> near_statics;
    for (const auto& r : statics)
        if (dist_point_rect(pos, r) - r_robot <= cfg.d_safe) near_statics.push_back(&r);
    const double wall_clear = std::min(std::min(pos.x - bounds.xmin(), bounds.xmax() - pos.x),
                                       std::min(pos.y - bounds.ymin(), bounds.ymax() - pos.y)) -
                              r_robot;
    const bool walls_near = wall_clear <= cfg.d_safe;

    const int steps = std::max(1, static_cast<int>(std::ceil(cfg.horizon / cfg.dt_check)));
    std::vector<Point2> obs_pos(dynamics.size() * (steps + 1));
    for (std::size_t i = 0; i < dynamics.size(); ++i)
        for (int k = 0; k <= steps; ++k) {
            const Pose2D p = obstacle_pose_at(dynamics[i], t_now + k * cfg.dt_check);
            obs_pos[i * (steps + 1) + k] = {p.x, p.y};
        }

    for (int i = 0; i < grid.n_v; ++i) {
        for (int j = 0; j < grid.n_omega; ++j) {
            DynamicObstacle roll;  // reuse the constant-twist flow for the robot
            roll.initial_pose = state.pose;
            roll.motion = {grid.v_at(i), grid.omega_at(j)};
            bool bad = false;
            for (int k = 1; k <= steps && !bad; ++k) {
                const Pose2D rp = obstacle_pose_at(roll, k * cfg.dt_check);
                const Point2 p{rp.x, rp.y};
                for (std::size_t o = 0; o < dynamics.size(); ++o) {
                    if (dist(p, obs_pos[o * (steps + 1) + k]) <
                        r_robot + dynamics[o].radius + cfg.margin) {
                        bad = true;
                        break;
                    }
                }
                if (!bad)
                    for (const AxisRect* r : near_statics)
                        if (dist_point_rect(p, *r) < r_robot + cfg.margin) {
                            bad = true;
                            break;
                        }
                if (!bad && walls_near) {
                    if (p.x < bounds.xmin() + r_robot || p.x > bounds.xmax() - r_robot ||
                        p.y < bounds.ymin() + r_robot || p.y > bounds.ymax() - r_robot)
                        bad = true;
                }
            }
            if (bad) grid.mark(i, j);
        }
    }
    return grid;
}

struct DovsChoice {
    Twist twist;
    bool fallback = false;  ///< no reachable free cell; emergency turn engaged
};

namespace detail {

/// Smallest heading change whose straight-line probe stays clear over the
/// horizon; used to pick the emergency turn direction. Returns +1/-1.
inline double free_heading_direction(const RobotState& state, double t_now,
                                     const std::vector<DynamicObstacle>& dynamics,
                                     const std::vector<const AxisRect*>& near_statics,
                                     double r_robot, const DovsConfig& cfg, double prefer) {
    const Point2 pos{state.pose.x, state.pose.y};
    const double v_probe = 0.1;
    const int steps = std::max(1, static_cast<int>(std::ceil(cfg.horizon / cfg.dt_check)));
    auto heading_free = [&](double heading) {
        for (int k = 1; k <= steps; ++k) {
            const double tau = k * cfg.dt_check;
            const Point2 p{pos.x + v_probe * tau * std::cos(heading),
                           pos.y + v_probe * tau * std::sin(heading)};
            for (const auto& d : dynamics) {
                const Pose2D op = obstacle_pose_at(d, t_now + tau);
                if (dist(p, {op.x, op.y}) < r_robot + d.radius + cfg.margin) return false;
            }
            for (const AxisRect* r : near_statics)
                if (dist_point_rect(p, *r) < r_robot + cfg.margin) return false;
        }
        return true;
    };
    for (int step = 1; step <= 36; ++step) {
        const double delta = step * (M_PI / 36.0);
        const double first = prefer >= 0.0 ? 1.0 : -1.0;
        if (heading_free(state.pose.theta + first * delta)) return first;
        if (heading_free(state.pose.theta - first * delta)) return -first;
    }
    return prefer >= 0.0 ? 1.0 : -1.0;
}

} // namespace detail

/// Pick the free grid twist reachable within one acceleration step that is
/// closest to the goal twist (weighted by the velocity limits). When the whole
/// reachable window is forbidden, fall back to an angular-acceleration-limited
/// turn while shedding speed.
inline DovsChoice choose_velocity(const VelocityGrid& grid, const RobotState& state, double t_now,
                                  const std::vector<DynamicObstacle>& dynamics,
                                  const std::vector<AxisRect>& statics, double r_robot,
                                  const DovsConfig& cfg, const RobotLimits& limits, double dt) {
    const Twist cur = state.twist;
    const double dv = limits.a_max * dt + 1e-9;
    const double dw = limits.alpha_max * dt + 1e-9;

    double best_score = std::numeric_limits<double>::infinity();
    Twist best{};
    bool found = false;
    for (int i = 0; i < grid.n_v; ++i) {
        const double v = grid.v_at(i);
        if (std::abs(v - cur.v) > dv) continue;
        for (int j = 0; j < grid.n_omega; ++j) {
            const double w = grid.omega_at(j);
            if (std::abs(w - cur.omega) > dw) continue;
            if (grid.is_forbidden(i, j)) continue;
            const double score = std::abs(v - cfg.goal_twist.v) / limits.v_max +
                                 std::abs(w - cfg.goal_twist.omega) / limits.omega_max;
            if (score < best_score) {
                best_score = score;
                best = {v, w};
                found = true;
            }
        }
    }
    if (found) return {best, false};

    // Emergency: decelerate and rotate toward the nearest free heading.
    const Point2 pos{state.pose.x, state.pose.y};
    std::vector<const AxisRect*> near_statics;
    for (const auto& r : statics)
        if (dist_point_rect(pos, r) - r_robot <= cfg.d_safe) near_statics.push_back(&r);
    const double dir = detail::free_heading_direction(state, t_now, dynamics, near_statics,
                                                      r_robot, cfg, cfg.goal_twist.omega);
    DovsChoice c;
    c.fallback = true;
    c.twist.v = std::max(0.0, cur.v - limits.a_max * dt);
    c.twist.omega = clamp(cur.omega + dir * limits.alpha_max * dt, -limits.omega_max, limits.omega_max);
    return c;
}

/// One control step of the baseline: build the forbidden mask for the current
/// state, derive the goal twist (full speed, bearing-proportional turn rate)
/// and select the admissible velocity.
inline DovsChoice dovs_step(const RobotState& state, const World& world, double t,
                            const Point2& goal, double r_robot, DovsConfig cfg,
                            const RobotLimits& limits, double dt) {
    const double bearing =
        std::atan2(goal.y - state.pose.y, goal.x - state.pose.x) - state.pose.theta;
    cfg.goal_twist.v = limits.v_max;
    cfg.goal_twist.omega =
        clamp(cfg.goal_bearing_gain * wrap_angle(bearing), -limits.omega_max, limits.omega_max);

    const VelocityGrid grid = forbidden_velocities(state, t, world.dynamics, world.statics,
                                                   world.bounds, r_robot, cfg, limits);
    return choose_velocity(grid, state, t, world.dynamics, world.statics, r_robot, cfg, limits, dt);
}

} // namespace seqbit
