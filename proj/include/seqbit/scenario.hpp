#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "seqbit/core.hpp"
#include "seqbit/world.hpp"

namespace seqbit {

/// Raised on malformed or invalid scenario documents; the message names the
/// offending key.
struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RobotSpec {
    double radius = 0.25;
    RobotLimits limits;
    Pose2D start;
    Point2 goal;
};

struct SimParams {
    double dt = 0.05;
    double t_max = 120.0;
    int runs = 30;
    std::uint64_t seed = 1;
};

struct Scenario {
    World world;
    RobotSpec robot;
    SimParams sim;
    std::string name;
};

namespace detail {

inline double require_number(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ScenarioError("scenario: missing or non-numeric key '" + key + "'");
    return j.at(key).get<double>();
}

inline double number_or(const nlohmann::json& j, const std::string& key, double def) {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_number())
        throw ScenarioError("scenario: non-numeric key '" + key + "'");
    return j.at(key).get<double>();
}

inline void require_positive(double v, const std::string& key) {
    if (!(v > 0.0)) throw ScenarioError("scenario: key '" + key + "' must be > 0");
}

} // namespace detail

/// Parse and validate a scenario document.
///
/// Format: one JSON object per file with keys
///   bounds{w,h}
///   robot{radius, v_max, omega_max, a_max, alpha_max, start{x,y,theta}, goal{x,y}}
///   statics[]{cx,cy,hw,hh}
///   dynamics[]{radius, x,y,theta, v, omega}
///   sim{dt, t_max, runs, seed}
/// Lengths in meters, angles in radians, time in seconds.
inline Scenario load_scenario(const std::string& text, const std::string& name = "") {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("scenario: not valid JSON: ") + e.what());
    }

    Scenario sc;
    sc.name = name;

    if (!j.contains("bounds") || !j["bounds"].is_object())
        throw ScenarioError("scenario: missing object 'bounds'");
    const double w = detail::require_number(j["bounds"], "w");
    const double h = detail::require_number(j["bounds"], "h");
    detail::require_positive(w, "bounds.w");
    detail::require_positive(h, "bounds.h");
    sc.world.bounds = {{0.5 * w, 0.5 * h}, 0.5 * w, 0.5 * h};

    if (!j.contains("robot") || !j["robot"].is_object())
        throw ScenarioError("scenario: missing object 'robot'");
    const auto& jr = j["robot"];
    sc.robot.radius = detail::require_number(jr, "radius");
    detail::require_positive(sc.robot.radius, "robot.radius");
    sc.robot.limits.v_max = detail::require_number(jr, "v_max");
    sc.robot.limits.omega_max = detail::require_number(jr, "omega_max");
    sc.robot.limits.a_max = detail::require_number(jr, "a_max");
    sc.robot.limits.alpha_max = detail::require_number(jr, "alpha_max");
    detail::require_positive(sc.robot.limits.v_max, "robot.v_max");
    detail::require_positive(sc.robot.limits.omega_max, "robot.omega_max");
    detail::require_positive(sc.robot.limits.a_max, "robot.a_max");
    detail::require_positive(sc.robot.limits.alpha_max, "robot.alpha_max");
    if (!jr.contains("start") || !jr["start"].is_object())
        throw ScenarioError("scenario: missing object 'robot.start'");
    sc.robot.start = {detail::require_number(jr["start"], "x"),
                      detail::require_number(jr["start"], "y"),
                      detail::number_or(jr["start"], "theta", 0.0)};
    if (!jr.contains("goal") || !jr["goal"].is_object())
        throw ScenarioError("scenario: missing object 'robot.goal'");
    sc.robot.goal = {detail::require_number(jr["goal"], "x"),
                     detail::require_number(jr["goal"], "y")};

    if (j.contains("statics")) {
        if (!j["statics"].is_array()) throw ScenarioError("scenario: 'statics' must be an array");
        for (const auto& js : j["statics"]) {
            AxisRect r{{detail::require_number(js, "cx"), detail::require_number(js, "cy")},
                       detail::require_number(js, "hw"),
                       detail::require_number(js, "hh")};
            detail::require_positive(r.half_width, "statics[].hw");
            detail::require_positive(r.half_height, "statics[].hh");
            if (!sc.world.bounds.contains_rect(r))
                throw ScenarioError("scenario: static obstacle outside bounds");
            sc.world.statics.push_back(r);
        }
    }

    if (j.contains("dynamics")) {
        if (!j["dynamics"].is_array()) throw ScenarioError("scenario: 'dynamics' must be an array");
        for (const auto& jd : j["dynamics"]) {
            DynamicObstacle d;
            d.radius = detail::require_number(jd, "radius");
            detail::require_positive(d.radius, "dynamics[].radius");
            d.initial_pose = {detail::require_number(jd, "x"),
                              detail::require_number(jd, "y"),
                              detail::require_number(jd, "theta")};
            d.motion.v = detail::require_number(jd, "v");
            d.motion.omega = detail::require_number(jd, "omega");
            if (d.motion.v < 0.0) throw ScenarioError("scenario: key 'dynamics[].v' must be >= 0");
            if (!sc.world.bounds.contains({d.initial_pose.x, d.initial_pose.y}))
                throw ScenarioError("scenario: dynamic obstacle outside bounds");
            sc.world.dynamics.push_back(d);
        }
    }

    if (j.contains("sim")) {
        const auto& js = j["sim"];
        sc.sim.dt = detail::number_or(js, "dt", sc.sim.dt);
        sc.sim.t_max = detail::number_or(js, "t_max", sc.sim.t_max);
        sc.sim.runs = static_cast<int>(detail::number_or(js, "runs", sc.sim.runs));
        sc.sim.seed = static_cast<std::uint64_t>(detail::number_or(js, "seed", 1.0));
        detail::require_positive(sc.sim.dt, "sim.dt");
        detail::require_positive(sc.sim.t_max, "sim.t_max");
        if (sc.sim.runs < 1) throw ScenarioError("scenario: key 'sim.runs' must be >= 1");
    }

    // Query endpoints must be usable by the planner.
    const SceneSnapshot snap(sc.world, 0.0, false);
    if (!snap.point_free({sc.robot.start.x, sc.robot.start.y}, sc.robot.radius))
        throw ScenarioError("scenario: 'robot.start' is in collision or outside bounds");
    if (!snap.point_free(sc.robot.goal, sc.robot.radius))
        throw ScenarioError("scenario: 'robot.goal' is in collision or outside bounds");

    return sc;
}

inline Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("scenario: cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string stem = path;
    const auto slash = stem.find_last_of("/\\");
    if (slash != std::string::npos) stem = stem.substr(slash + 1);
    const auto dot = stem.find_last_of('.');
    if (dot != std::string::npos) stem = stem.substr(0, dot);
    return load_scenario(ss.str(), stem);
}

} // namespace seqbit
