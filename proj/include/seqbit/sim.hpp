#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqbit/control.hpp"
#include "seqbit/dovs.hpp"
#include "seqbit/replanner.hpp"
#include "seqbit/scenario.hpp"

namespace seqbit {

enum class Outcome { Reached, Crashed, Timeout };

enum class PlannerKind { SeqBit, Dovs };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Reached: return "Reached";
        case Outcome::Crashed: return "Crashed";
        default: return "Timeout";
    }
}

inline const char* to_string(PlannerKind k) { return k == PlannerKind::SeqBit ? "seqbit" : "dovs"; }

struct TraceRow {
    double t = 0.0;
    Pose2D pose;
    Twist twist;
    std::string event;  ///< ';'-separated events, possibly with key=value payloads
};

struct RunResult {
    double path_length = 0.0;   ///< integrated robot travel, m
    double plan_time = 0.0;     ///< wall-clock spent planning, s
    double time_to_goal = 0.0;  ///< simulated time at termination, s
    Outcome outcome = Outcome::Timeout;
    std::vector<TraceRow> trace;
    int virtuals_used = 0;
    double min_clearance = std::numeric_limits<double>::infinity();
    int replan_calls = 0;
    int bitstar_invocations = 0;
};

/// Physical collision test: the robot disc against statics and the frozen
/// dynamic discs. Virtual obstacles are planning constructs, not matter, and
/// never collide.
inline bool detect_collision(const Disc& robot, const SceneSnapshot& snap) {
    for (const auto& r : snap.statics())
        if (dist_point_rect(robot.center, r) < robot.radius) return true;
    for (const auto& d : snap.frozen_dynamics())
        if (dist(robot.center, d.center) < robot.radius + d.radius) return true;
    return false;
}

struct AggregateStats {
    int n = 0;
    int reached = 0;
    double failure_rate = 0.0;
    double path_length_mean = 0.0, path_length_std = 0.0;
    double plan_time_mean = 0.0, plan_time_std = 0.0;
    double time_to_goal_mean = 0.0, time_to_goal_std = 0.0;
};

/// Mean/stddev per metric over same-scenario runs. Runs that did not reach the
/// goal are excluded from the metric means and only feed the failure rate.
inline AggregateStats aggregate(const std::vector<RunResult>& results) {
    if (results.empty()) throw std::invalid_argument("aggregate: empty result list");
    AggregateStats st;
    st.n = static_cast<int>(results.size());
    std::vector<double> len, pt, ttg;
    for (const auto& r : results) {
        if (r.outcome == Outcome::Reached) {
            ++st.reached;
            len.push_back(r.path_length);
            pt.push_back(r.plan_time);
            ttg.push_back(r.time_to_goal);
        }
    }
    st.failure_rate = 1.0 - static_cast<double>(st.reached) / st.n;
    auto mean_std = [](const std::vector<double>& xs, double& mean, double& sd) {
        if (xs.empty()) {
            mean = 0.0;
            sd = 0.0;
            return;
        }
        double m = 0.0;
        for (double x : xs) m += x;
        m /= static_cast<double>(xs.size());
        double v = 0.0;
        for (double x : xs) v += (x - m) * (x - m);
        mean = m;
        sd = std::sqrt(v / static_cast<double>(xs.size()));
    };
    mean_std(len, st.path_length_mean, st.path_length_std);
    mean_std(pt, st.plan_time_mean, st.plan_time_std);
    mean_std(ttg, st.time_to_goal_mean, st.time_to_goal_std);
    return st;
}

struct SimOptions {
    double goal_tolerance = 0.2;  ///< m
    double retry_interval = 1.0;  ///< s between replan attempts while blocked
    int monitor_stride = 10;      ///< steps between reference re-predictions
    TrackingGains gains;
    ReplannerConfig replanner;  ///< seqbit settings (seed is overridden per run)
    DovsConfig dovs;
};

/// Deterministic fixed-step closed-loop run of one scenario under the chosen
/// planner. All failures are recorded outcomes, not errors.
inline RunResult run(const Scenario& scenario, PlannerKind kind, std::uint64_t seed,
                     SimOptions opts = {}) {
    const double dt = scenario.sim.dt;
    const double t_max = scenario.sim.t_max;
    const RobotSpec& robot = scenario.robot;
    const RobotLimits& limits = robot.limits;

    World world = scenario.world;  // per-run copy; virtual overlay accumulates here
    RobotState st{robot.start, {0.0, 0.0}};
    RunResult res;

    opts.replanner.planner.rng_seed = seed;
    opts.replanner.dt = dt;

    double t = 0.0;
    TimedTrajectory active_ref;
    bool tracking = false;
    double next_retry = 0.0;
    int monitor_countdown = 0;
    std::string pending_events;

    auto add_event = [&](const std::string& e) {
        if (!pending_events.empty()) pending_events += ';';
        pending_events += e;
    };
    auto record_row = [&]() {
        res.trace.push_back({t, st.pose, st.twist, pending_events});
        pending_events.clear();
    };

    auto virtual_event = [](const AxisRect& r) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "VIRTUAL_ADDED cx=%.9g cy=%.9g h=%.9g", r.center.x,
                      r.center.y, r.half_width);
        return std::string(buf);
    };

    auto do_replan = [&](bool initial) {
        ReplanOutcome rp = replan(world, st.pose, robot.goal, t, robot, opts.replanner);
        res.plan_time += rp.wall_seconds;
        ++res.replan_calls;
        res.bitstar_invocations += rp.state.bitstar_invocations;
        add_event(initial ? "PLAN" : "REPLAN");
        for (const auto& v : rp.state.virtuals) add_event(virtual_event(v));
        if (rp.ok()) {
            bool rotates = false;
            for (const auto& s : rp.trajectory.samples) {
                if (s.twist.v > 1e-9) break;
                if (std::abs(s.twist.omega) > 1e-9) {
                    rotates = true;
                    break;
                }
            }
            if (rotates) add_event("SWITCH");
            active_ref = rp.trajectory;
            tracking = true;
        } else {
            tracking = false;
            next_retry = t + opts.retry_interval;
        }
    };

    // initial state row precedes the first step
    if (kind == PlannerKind::SeqBit) do_replan(true);
    record_row();

    const int max_steps = static_cast<int>(std::ceil(t_max / dt));
    for (int step = 0; step < max_steps; ++step) {
        const Point2 pos{st.pose.x, st.pose.y};
        if (dist(pos, robot.goal) <= opts.goal_tolerance) {
            res.outcome = Outcome::Reached;
            auto& ev = res.trace.back().event;
            ev += ev.empty() ? "GOAL" : ";GOAL";
            break;
        }

        Twist cmd{0.0, 0.0};
        if (kind == PlannerKind::SeqBit) {
            if (tracking) {
                if (--monitor_countdown <= 0) {
                    monitor_countdown = opts.monitor_stride;
                    auto pred = predict_first_collision(
                        active_ref, world.dynamics, robot.radius + opts.replanner.predict_margin,
                        std::max(0.0, active_ref.end_time() - t) + 1.0, opts.replanner.dt_check);
                    if (pred && pred->t_hit > t) {
                        // brake, then replan from rest
                        tracking = false;
                        next_retry = t;
                    }
                }
            }
            if (tracking) {
                const TimedSample ref = active_ref.at(t);
                cmd = track(st, ref.pose, ref.twist, opts.gains, limits);
            } else {
                cmd = {0.0, 0.0};
                if (t >= next_retry && std::abs(st.twist.v) < 1e-6 &&
                    std::abs(st.twist.omega) < 1e-6) {
                    do_replan(false);
                }
            }
        } else {
            const auto wall0 = std::chrono::steady_clock::now();
            const DovsChoice choice =
                dovs_step(st, world, t, robot.goal, robot.radius, opts.dovs, limits, dt);
            res.plan_time +=
                std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
            cmd = choice.twist;
        }

        const RobotState prev = st;
        st = step_robot(st, cmd, dt, limits);
        t += dt;
        res.path_length += dist({prev.pose.x, prev.pose.y}, {st.pose.x, st.pose.y});

        // physical collision + wall containment at the new state
        const SceneSnapshot snap(world, t);
        const Disc body{{st.pose.x, st.pose.y}, robot.radius};
        double clear = std::numeric_limits<double>::infinity();
        for (const auto& r : snap.statics())
            clear = std::min(clear, dist_point_rect(body.center, r) - robot.radius);
        for (const auto& d : snap.frozen_dynamics())
            clear = std::min(clear, dist(body.center, d.center) - robot.radius - d.radius);
        clear = std::min(clear, std::min(std::min(body.center.x - world.bounds.xmin(),
                                                  world.bounds.xmax() - body.center.x),
                                         std::min(body.center.y - world.bounds.ymin(),
                                                  world.bounds.ymax() - body.center.y)) -
                                    robot.radius);
        res.min_clearance = std::min(res.min_clearance, clear);

        const bool out_of_bounds = body.center.x < world.bounds.xmin() + robot.radius ||
                                   body.center.x > world.bounds.xmax() - robot.radius ||
                                   body.center.y < world.bounds.ymin() + robot.radius ||
                                   body.center.y > world.bounds.ymax() - robot.radius;
        if (detect_collision(body, snap) || out_of_bounds) {
            res.outcome = Outcome::Crashed;
            add_event("CRASH");
            record_row();
            break;
        }
        record_row();
    }

    res.time_to_goal = t;
    res.virtuals_used = static_cast<int>(world.virtuals.size());
    return res;
}

/// Trace log: header plus one CSV record per step; the event column may carry
/// space-separated key=value payloads but never commas.
inline std::string serialize_trace(const std::vector<TraceRow>& trace) {
    std::string out = "t,x,y,theta,v,omega,event\n";
    char buf[256];
    for (const auto& r : trace) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,", r.t, r.pose.x, r.pose.y,
                      r.pose.theta, r.twist.v, r.twist.omega);
        out += buf;
        out += r.event;
        out += '\n';
    }
    return out;
}

inline std::vector<TraceRow> parse_trace(const std::string& text) {
    std::vector<TraceRow> rows;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,x,y,theta,v,omega,event", 0) != 0)
        throw std::runtime_error("trace: missing header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        TraceRow r;
        const char* s = line.c_str();
        char* end = nullptr;
        double* fields[6] = {&r.t, &r.pose.x, &r.pose.y, &r.pose.theta, &r.twist.v,
                             &r.twist.omega};
        for (int i = 0; i < 6; ++i) {
            *fields[i] = std::strtod(s, &end);
            if (end == s || *end != ',') throw std::runtime_error("trace: malformed row");
            s = end + 1;
        }
        r.event = s;
        rows.push_back(r);
    }
    return rows;
}

} // namespace seqbit
