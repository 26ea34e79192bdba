#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "seqbit/replanner.hpp"

using namespace seqbit;

namespace {

TimedTrajectory straight_reference(const Point2& from, double heading, double speed,
                                   double duration, double dt = 0.05) {
    TimedTrajectory traj;
    for (double t = 0.0; t <= duration + 1e-9; t += dt) {
        traj.samples.push_back(
            {t,
             {from.x + speed * t * std::cos(heading), from.y + speed * t * std::sin(heading),
              heading},
             {speed, 0.0}});
    }
    return traj;
}

DynamicObstacle make_obs(double x, double y, double th, double v, double w, double r = 0.25) {
    DynamicObstacle d;
    d.radius = r;
    d.initial_pose = {x, y, th};
    d.motion = {v, w};
    return d;
}

} // namespace

TEST_CASE("no dynamic obstacles yields no prediction") {
    const TimedTrajectory ref = straight_reference({0, 0}, 0.0, 0.4, 20.0);
    CHECK_FALSE(predict_first_collision(ref, {}, 0.25, 20.0, 0.05).has_value());
}

TEST_CASE("head-on closing matches the 1D closed form") {
    const TimedTrajectory ref = straight_reference({0, 0}, 0.0, 0.4, 20.0);
    const std::vector<DynamicObstacle> dyn{make_obs(4, 0, M_PI, 0.12, 0.0)};
    const auto pred = predict_first_collision(ref, dyn, 0.25, 20.0, 0.05);
    REQUIRE(pred.has_value());
    // gap 4 - 0.5 closing at 0.52: t = 6.7308, robot at 2.6923
    CHECK(pred->t_hit == Catch::Approx(3.5 / 0.52).margin(2e-3));
    CHECK(pred->x_hit.x == Catch::Approx(2.6923).margin(2e-3));
    CHECK(pred->x_hit.y == Catch::Approx(0.0).margin(1e-9));
    CHECK(pred->obstacle_id == 0);
}

TEST_CASE("paths that cross with a time offset do not collide") {
    // obstacle crosses the robot's track well before the robot arrives there
    const TimedTrajectory ref = straight_reference({0, 0}, 0.0, 0.4, 25.0);
    const std::vector<DynamicObstacle> dyn{make_obs(8, 0.8, -M_PI / 2, 0.5, 0.0)};
    // obstacle is at (8, 0) around t=1.6; robot reaches x=8 at t=20
    const auto pred = predict_first_collision(ref, dyn, 0.25, 25.0, 0.05);
    CHECK_FALSE(pred.has_value());
    // dense-sweep oracle agrees
    bool any_overlap = false;
    for (double t = 0.0; t <= 25.0; t += 1e-4) {
        const Pose2D op = obstacle_pose_at(dyn[0], t);
        if (dist(ref.position_at(t), {op.x, op.y}) < 0.5) any_overlap = true;
    }
    CHECK_FALSE(any_overlap);
}

TEST_CASE("earliest obstacle wins when several would be hit") {
    const TimedTrajectory ref = straight_reference({0, 0}, 0.0, 0.4, 40.0);
    const std::vector<DynamicObstacle> dyn{make_obs(12, 0, M_PI, 0.12, 0.0),
                                           make_obs(4, 0, M_PI, 0.12, 0.0)};
    const auto pred = predict_first_collision(ref, dyn, 0.25, 40.0, 0.05);
    REQUIRE(pred.has_value());
    CHECK(pred->obstacle_id == 1);
}

TEST_CASE("virtual obstacle sizing follows the combined footprint rule") {
    SECTION("equal diameters") {
        const AxisRect r = make_virtual_obstacle({3, 4}, 0.5, 0.5);
        CHECK(r.center.x == Catch::Approx(3.0));
        CHECK(r.center.y == Catch::Approx(4.0));
        CHECK(2.0 * r.half_width == Catch::Approx(2.0));
        CHECK(2.0 * r.half_height == Catch::Approx(2.0));
    }
    SECTION("mixed diameters") {
        const AxisRect r = make_virtual_obstacle({0, 0}, 0.5, 0.25);
        CHECK(2.0 * r.half_width == Catch::Approx(1.5));
    }
    SECTION("containment of the combined disc in the inner half") {
        const AxisRect r = make_virtual_obstacle({0, 0}, 0.5, 0.5);
        const double rr = 0.25 + 0.25;
        Rng rng(2);
        for (int i = 0; i < 1000; ++i) {
            const Point2 c{rng.uniform(-r.half_width / 2, r.half_width / 2),
                           rng.uniform(-r.half_height / 2, r.half_height / 2)};
            CHECK(c.x - rr >= r.xmin());
            CHECK(c.x + rr <= r.xmax());
            CHECK(c.y - rr >= r.ymin());
            CHECK(c.y + rr <= r.ymax());
        }
    }
}

namespace {

RobotSpec desk_robot(const Pose2D& start, const Point2& goal) {
    RobotSpec r;
    r.radius = 0.25;
    r.start = start;
    r.goal = goal;
    return r;
}

ReplannerConfig fast_cfg(std::uint64_t seed) {
    ReplannerConfig cfg;
    cfg.planner.rng_seed = seed;
    cfg.planner.max_batches = 6;
    return cfg;
}

} // namespace

TEST_CASE("replan returns immediately when the first plan is clean") {
    World w;
    w.bounds = {{7.5, 5.5}, 7.5, 5.5};
    const RobotSpec robot = desk_robot({1.5, 5.5, 0}, {13.5, 5.5});
    const ReplanOutcome out = replan(w, robot.start, robot.goal, 0.0, robot, fast_cfg(11));
    REQUIRE(out.ok());
    CHECK(out.state.iterations == 1);
    CHECK(out.state.virtuals.empty());
    CHECK(w.virtuals.empty());
    CHECK(out.trajectory.duration() > 25.0);  // ~12 m at <= 0.4 m/s
}

TEST_CASE("replan materializes a virtual square on the predicted collision") {
    World w;
    w.bounds = {{7.5, 5.5}, 7.5, 5.5};
    w.dynamics.push_back(make_obs(12.5, 5.5, M_PI, 0.12, 0.0));
    const RobotSpec robot = desk_robot({1.5, 5.5, 0}, {13.5, 5.5});
    const ReplanOutcome out = replan(w, robot.start, robot.goal, 0.0, robot, fast_cfg(17));
    REQUIRE(out.ok());
    REQUIRE_FALSE(out.state.virtuals.empty());
    REQUIRE(out.state.hits.size() == out.state.virtuals.size());
    for (std::size_t i = 0; i < out.state.virtuals.size(); ++i) {
        CHECK(out.state.virtuals[i].center.x == Catch::Approx(out.state.hits[i].x_hit.x));
        CHECK(out.state.virtuals[i].center.y == Catch::Approx(out.state.hits[i].x_hit.y));
        CHECK(out.state.virtuals[i].half_width == Catch::Approx(2.0 * 0.25 + 2.0 * 0.25));
    }
    CHECK(w.virtuals.size() == out.state.virtuals.size());

    // returned reference has positive predicted clearance at a finer stride
    const auto recheck = predict_first_collision(out.trajectory, w.dynamics, robot.radius,
                                                 out.trajectory.duration() + 1.0, 0.005);
    CHECK_FALSE(recheck.has_value());
}

TEST_CASE("every successive plan respects all accumulated virtuals") {
    World w;
    w.bounds = {{7.5, 5.5}, 7.5, 5.5};
    w.dynamics.push_back(make_obs(12.5, 5.5, M_PI, 0.12, 0.0));
    const RobotSpec robot = desk_robot({1.5, 5.5, 0}, {13.5, 5.5});
    const ReplanOutcome out = replan(w, robot.start, robot.goal, 0.0, robot, fast_cfg(23));
    REQUIRE(out.ok());
    const double inflate = robot.radius;  // final path must still clear with the raw radius
    for (const auto& v : w.virtuals) {
        const auto& wp = out.best.waypoints;
        for (std::size_t i = 1; i < wp.size(); ++i)
            CHECK_FALSE(segment_intersects_rect({wp[i - 1], wp[i]}, v, inflate));
    }
}

TEST_CASE("speculative and sequential execution produce identical plans") {
    auto run_once = [&](bool speculative) {
        World w;
        w.bounds = {{7.5, 5.5}, 7.5, 5.5};
        w.dynamics.push_back(make_obs(12.5, 5.5, M_PI, 0.12, 0.0));
        w.dynamics.push_back(make_obs(9.0, 1.5, M_PI / 2, 0.2, 0.0));
        const RobotSpec robot = desk_robot({1.5, 5.5, 0}, {13.5, 5.5});
        ReplannerConfig cfg = fast_cfg(29);
        cfg.speculative_parallel = speculative;
        return replan(w, robot.start, robot.goal, 0.0, robot, cfg);
    };
    const ReplanOutcome a = run_once(true);
    const ReplanOutcome b = run_once(false);
    REQUIRE(a.status == b.status);
    REQUIRE(a.best.waypoints.size() == b.best.waypoints.size());
    for (std::size_t i = 0; i < a.best.waypoints.size(); ++i) {
        CHECK(a.best.waypoints[i].x == b.best.waypoints[i].x);
        CHECK(a.best.waypoints[i].y == b.best.waypoints[i].y);
    }
    CHECK(a.state.virtuals.size() == b.state.virtuals.size());
    CHECK(a.state.bitstar_invocations == b.state.bitstar_invocations);
}
