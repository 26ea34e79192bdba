#pragma once

#include <atomic>
#include <chrono>
#include <future>
#include <memory>
#include <optional>
#include <vector>

#include "seqbit/bitstar.hpp"
#include "seqbit/control.hpp"
#include "seqbit/reference.hpp"
#include "seqbit/scenario.hpp"
#include "seqbit/world.hpp"

namespace seqbit {

/// Predicted robot/obstacle contact along a timed reference.
struct CollisionPrediction {
    double t_hit = 0.0;
    Point2 x_hit;       ///< robot position at impact
    int obstacle_id = -1;
};

/// Earliest time within [start, start+horizon] at which the robot disc,
/// following `ref`, overlaps any dynamic obstacle on its known constant-twist
/// trajectory. Sampled at dt_check and refined by bisection to 1e-3 s.
inline std::optional<CollisionPrediction> predict_first_collision(
    const TimedTrajectory& ref, const std::vector<DynamicObstacle>& dynamics, double r_robot,
    double horizon, double dt_check) {
    if (ref.empty() || dynamics.empty()) return std::nullopt;

    const double t0 = ref.start_time();
    const double t1 = std::min(ref.end_time(), t0 + horizon);

    auto overlap = [&](double t, const DynamicObstacle& d) {
        const Pose2D op = obstacle_pose_at(d, t);
        return dist(ref.position_at(t), {op.x, op.y}) < r_robot + d.radius;
    };

    const int steps = std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt_check)));
    double t_prev = t0;
    for (int k = 0; k <= steps; ++k) {
        const double t = std::min(t0 + k * dt_check, t1);
        int first_obs = -1;
        double best_hit = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < dynamics.size(); ++i) {
            if (!overlap(t, dynamics[i])) continue;
            // refine over [t_prev, t]; at k == 0 the overlap is immediate
            double hit = t;
            if (k > 0) {
                double lo = t_prev, hi = t;
                while (hi - lo > 1e-3) {
                    const double mid = 0.5 * (lo + hi);
                    (overlap(mid, dynamics[i]) ? hi : lo) = mid;
                }
                hit = hi;
            }
            if (hit < best_hit) {
                best_hit = hit;
                first_obs = static_cast<int>(i);
            }
        }
        if (first_obs >= 0)
            return CollisionPrediction{best_hit, ref.position_at(best_hit), first_obs};
        t_prev = t;
        if (t >= t1) break;
    }
    return std::nullopt;
}

/// Virtual static obstacle standing in for a dynamic obstacle's occupancy at
/// the predicted collision: an axis-aligned square centered at the collision
/// point with side length twice the combined footprint extent of robot and
/// obstacle.
inline AxisRect make_virtual_obstacle(const Point2& x_hit, double robot_diameter,
                                      double obstacle_diameter) {
    const double half = robot_diameter + obstacle_diameter;
    return {x_hit, half, half};
}

struct ReplanState {
    std::vector<PlannerSolution> planned_paths;  ///< every consumed plan, in order
    std::vector<AxisRect> virtuals;              ///< squares added by this call
    std::vector<CollisionPrediction> hits;       ///< one per added square
    int iterations = 0;
    int max_iterations = 8;
    int bitstar_invocations = 0;
};

struct ReplannerConfig {
    PlannerConfig planner;       ///< full-quality planner settings
    int max_iterations = 8;
    double dt = 0.05;            ///< reference sampling period
    double dt_check = 0.05;      ///< collision-prediction stride
    double predict_margin = 0.05;  ///< extra radius when predicting contacts
    double safety_margin = 0.06;   ///< extra planning inflation over the robot radius
    bool speculative_parallel = true;
};

enum class ReplanStatus { Success, NoPath, MaxIterations, Blocked };

struct ReplanOutcome {
    ReplanStatus status = ReplanStatus::NoPath;
    PlannerSolution best;        ///< p*, the returned collision-free path
    TimedTrajectory trajectory;  ///< rotate-in-place prelude + timed path reference
    ReplanState state;
    double wall_seconds = 0.0;
    bool ok() const { return status == ReplanStatus::Success; }
};

namespace detail {

/// Timed reference for a planned polyline: rotate in place from the current
/// heading to the path tangent, then follow the curvature-limited profile.
inline TimedTrajectory build_reference(const std::vector<Point2>& waypoints,
                                       const SceneSnapshot& scene, const Pose2D& start_pose,
                                       const RobotSpec& robot, double inflate, double dt,
                                       double resolution, double t_now) {
    TimedTrajectory traj;
    if (waypoints.size() < 2) {
        traj.samples.push_back({t_now, start_pose, {0.0, 0.0}});
        return traj;
    }
    auto free = [&](const Point2& p) { return scene.point_free(p, inflate); };
    const SplinePath spline = smooth_waypoints(waypoints, free, robot.limits, resolution);

    // Shave the reference limits so the tracker keeps catch-up authority when
    // the feedforward saturates.
    RobotLimits ref_limits = robot.limits;
    ref_limits.v_max *= 0.96;
    ref_limits.omega_max *= 0.96;

    const double path_heading = spline.heading(0.0);
    RobotState rest{start_pose, {0.0, 0.0}};
    const std::vector<Twist> rot = switch_maneuver(rest, path_heading, ref_limits, dt);

    traj.samples.push_back({t_now, start_pose, {0.0, 0.0}});
    RobotState s = rest;
    for (std::size_t k = 0; k < rot.size(); ++k) {
        s.pose = integrate_twist(s.pose, rot[k], dt);
        s.twist = rot[k];
        traj.samples.push_back({t_now + (k + 1) * dt, s.pose, rot[k]});
    }
    const double t_rot_end = traj.samples.back().t;

    TimedTrajectory path_ref = generate_reference(spline, ref_limits, dt, t_rot_end);
    for (std::size_t i = 0; i < path_ref.samples.size(); ++i) {
        if (i == 0 && !traj.samples.empty() &&
            path_ref.samples[0].t <= traj.samples.back().t + 1e-12) {
            traj.samples.back() = path_ref.samples[0];  // seam sample
            continue;
        }
        traj.samples.push_back(path_ref.samples[i]);
    }
    return traj;
}

} // namespace detail

/// Sequential re-planning: plan with BIT* against statics plus the accumulated
/// virtual obstacles, predict the first collision of the resulting reference
/// against the known dynamic-obstacle motions, materialize a virtual square at
/// the predicted impact point, and repeat until the reference is clean.
///
/// Each iteration settles the constraint set with a cheap first-solution probe
/// while a full-quality query on the same constraint set runs concurrently;
/// the full plan is consumed once the constraints stop changing, so the total
/// latency stays close to a single full BIT* plan. Appended squares persist in
/// `world` for the remainder of the run.
inline ReplanOutcome replan(World& world, const Pose2D& start_pose, const Point2& goal,
                            double t_now, const RobotSpec& robot, const ReplannerConfig& cfg) {
    const auto wall0 = std::chrono::steady_clock::now();
    ReplanOutcome out;
    out.state.max_iterations = cfg.max_iterations;
    const Point2 start{start_pose.x, start_pose.y};
    const double inflate = robot.radius + cfg.safety_margin;
    const double r_predict = robot.radius + cfg.predict_margin;

    auto finish = [&](ReplanStatus st) {
        out.status = st;
        out.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
        return out;
    };

    if (dist(start, goal) < 1e-9) {
        out.best.waypoints = {start};
        out.best.cost = 0.0;
        out.trajectory.samples.push_back({t_now, start_pose, {0.0, 0.0}});
        return finish(ReplanStatus::Success);
    }

    // Speculative full-quality plan on the current constraint set.
    struct FullTask {
        std::future<PlanResult> fut;
        std::shared_ptr<std::atomic<bool>> cancel;
        std::size_t constraint_version = 0;
    };
    FullTask full;
    auto launch_full = [&](std::size_t version) {
        auto scene = std::make_shared<SceneSnapshot>(world, t_now, false);
        auto cancel = std::make_shared<std::atomic<bool>>(false);
        PlannerConfig pc = cfg.planner;
        pc.robot_radius = inflate;
        pc.rng_seed = Rng::mix(cfg.planner.rng_seed, 1000 + version);
        full.cancel = cancel;
        full.constraint_version = version;
        if (cfg.speculative_parallel) {
            full.fut = std::async(std::launch::async, [scene, cancel, pc, start, goal] {
                return plan(*scene, start, goal, pc, cancel.get());
            });
        } else {
            std::promise<PlanResult> pr;
            full.fut = pr.get_future();
            pr.set_value(plan(*scene, start, goal, pc, nullptr));
        }
    };
    auto cancel_full = [&]() {
        if (full.cancel) full.cancel->store(true);
        if (full.fut.valid()) full.fut.get();  // joins quickly once cancelled
    };

    launch_full(world.virtuals.size());

    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        out.state.iterations = iter;
        const SceneSnapshot scene(world, t_now, false);

        PlannerConfig probe_cfg = cfg.planner;
        probe_cfg.robot_radius = inflate;
        probe_cfg.first_solution_only = true;
        probe_cfg.rng_seed = Rng::mix(cfg.planner.rng_seed, static_cast<std::uint64_t>(iter));
        PlanResult probe = plan(scene, start, goal, probe_cfg);
        ++out.state.bitstar_invocations;

        if (probe.status == PlanStatus::InvalidQuery) {
            cancel_full();
            return finish(ReplanStatus::Blocked);
        }
        if (probe.status == PlanStatus::NoPath) {
            // the concurrent full query has more batches; give it the last word
            PlanResult fullres = full.fut.get();
            ++out.state.bitstar_invocations;
            if (!fullres.ok()) return finish(ReplanStatus::NoPath);
            probe = fullres;
            launch_full(world.virtuals.size());
        }

        out.state.planned_paths.push_back(probe.solution);
        TimedTrajectory traj = detail::build_reference(probe.solution.waypoints, scene, start_pose,
                                                       robot, inflate, cfg.dt,
                                                       cfg.planner.edge_check_resolution, t_now);
        auto pred = predict_first_collision(traj, world.dynamics, r_predict,
                                            traj.duration() + 1.0, cfg.dt_check);
        if (pred) {
            const AxisRect vob = make_virtual_obstacle(pred->x_hit, 2.0 * robot.radius,
                                                       2.0 * world.dynamics[pred->obstacle_id].radius);
            // A square that swallows the robot's own position cannot be
            // planned around; report the impasse to the caller instead.
            if (dist_point_rect(start, vob) <= inflate) {
                cancel_full();
                return finish(ReplanStatus::Blocked);
            }
            world.virtuals.push_back(vob);
            out.state.virtuals.push_back(vob);
            out.state.hits.push_back(*pred);
            cancel_full();
            launch_full(world.virtuals.size());
            continue;
        }

        // Constraint set is stable; adopt the full-quality plan if it is also
        // collision free, otherwise keep iterating on its collision.
        PlanResult fullres = full.fut.get();
        ++out.state.bitstar_invocations;
        if (fullres.ok()) {
            TimedTrajectory ftraj = detail::build_reference(fullres.solution.waypoints, scene,
                                                            start_pose, robot, inflate, cfg.dt,
                                                            cfg.planner.edge_check_resolution, t_now);
            auto fpred = predict_first_collision(ftraj, world.dynamics, r_predict,
                                                 ftraj.duration() + 1.0, cfg.dt_check);
            if (!fpred) {
                out.state.planned_paths.push_back(fullres.solution);
                out.best = fullres.solution;
                out.trajectory = ftraj;
                return finish(ReplanStatus::Success);
            }
            const AxisRect vob = make_virtual_obstacle(fpred->x_hit, 2.0 * robot.radius,
                                                       2.0 * world.dynamics[fpred->obstacle_id].radius);
            if (dist_point_rect(start, vob) <= inflate) return finish(ReplanStatus::Blocked);
            out.state.planned_paths.push_back(fullres.solution);
            world.virtuals.push_back(vob);
            out.state.virtuals.push_back(vob);
            out.state.hits.push_back(*fpred);
            launch_full(world.virtuals.size());
            continue;
        }
        // Full query failed where the probe succeeded (different sample set);
        // the probe's verified reference is a valid answer.
        out.best = probe.solution;
        out.trajectory = traj;
        return finish(ReplanStatus::Success);
    }
    cancel_full();
    return finish(ReplanStatus::MaxIterations);
}

} // namespace seqbit
