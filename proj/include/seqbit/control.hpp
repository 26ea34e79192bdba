#pragma once

#include <cmath>
#include <vector>

#include "seqbit/core.hpp"
#include "seqbit/world.hpp"

namespace seqbit {

struct RobotState {
    Pose2D pose;
    Twist twist;
};

/// Gains of the posture-error tracking law. All positive.
struct TrackingGains {
    double k_x = 1.0;
    double k_y = 4.0;
    double k_theta = 2.0;
};

/// Nonlinear kinematic tracking law on the body-frame posture error:
///   v     = v_r cos(e_theta) + k_x e_x
///   omega = w_r + v_r (k_y e_y + k_theta sin(e_theta))
/// clamped to the velocity limits. At zero error the command equals the
/// reference twist.
inline Twist track(const RobotState& state, const Pose2D& ref_pose, const Twist& ref_twist,
                   const TrackingGains& gains, const RobotLimits& limits) {
    const double c = std::cos(state.pose.theta);
    const double s = std::sin(state.pose.theta);
    const double dx = ref_pose.x - state.pose.x;
    const double dy = ref_pose.y - state.pose.y;
    const double ex = c * dx + s * dy;
    const double ey = -s * dx + c * dy;
    const double eth = wrap_angle(ref_pose.theta - state.pose.theta);

    double v = ref_twist.v * std::cos(eth) + gains.k_x * ex;
    double w = ref_twist.omega + ref_twist.v * (gains.k_y * ey + gains.k_theta * std::sin(eth));
    // Pure-rotation references leave the omega channel feed-forward only;
    // close the heading loop directly there.
    if (std::abs(ref_twist.v) < 1e-9) w += gains.k_theta * eth;

    return {clamp(v, -limits.v_max, limits.v_max), clamp(w, -limits.omega_max, limits.omega_max)};
}

/// Plant model: slew the commanded twist by the acceleration limits, clamp to
/// the velocity limits, then integrate the unicycle exactly over dt.
inline RobotState step_robot(const RobotState& state, const Twist& cmd, double dt,
                             const RobotLimits& limits) {
    const double dv = limits.a_max * dt;
    const double dw = limits.alpha_max * dt;
    Twist u;
    u.v = clamp(clamp(cmd.v, state.twist.v - dv, state.twist.v + dv), -limits.v_max, limits.v_max);
    u.omega = clamp(clamp(cmd.omega, state.twist.omega - dw, state.twist.omega + dw),
                    -limits.omega_max, limits.omega_max);
    return {integrate_twist(state.pose, u, dt), u};
}

/// Closed-form description of the rotate-in-place profile used when switching
/// paths: ramp |omega| up at alpha_max, optionally cruise at omega_max, ramp
/// back to zero at the target heading.
struct SwitchProfile {
    double direction = 1.0;  ///< +1 turns left, -1 turns right
    double peak_omega = 0.0;
    double t_rise = 0.0;
    double t_cruise = 0.0;
    double t_fall = 0.0;

    double duration() const { return t_rise + t_cruise + t_fall; }

    /// Desired angular rate at time t since the profile start.
    double omega_at(double t) const {
        double w = 0.0;
        if (t <= 0.0) {
            w = 0.0;
        } else if (t < t_rise) {
            w = peak_omega * t / t_rise;
        } else if (t < t_rise + t_cruise) {
            w = peak_omega;
        } else if (t < duration()) {
            w = peak_omega * (duration() - t) / t_fall;
        }
        return direction * w;
    }
};

inline SwitchProfile compute_switch_profile(double delta_theta, const RobotLimits& limits) {
    SwitchProfile p;
    const double mag = std::abs(delta_theta);
    p.direction = (delta_theta >= 0.0) ? 1.0 : -1.0;
    if (mag < 1e-12) return p;
    const double theta_tri = limits.omega_max * limits.omega_max / limits.alpha_max;
    if (mag <= theta_tri) {
        p.peak_omega = std::sqrt(mag * limits.alpha_max);
        p.t_rise = p.t_fall = p.peak_omega / limits.alpha_max;
    } else {
        p.peak_omega = limits.omega_max;
        p.t_rise = p.t_fall = limits.omega_max / limits.alpha_max;
        p.t_cruise = (mag - theta_tri) / limits.omega_max;
    }
    return p;
}

/// Rotate-in-place command sequence from the current heading to
/// new_path_heading: the bang-bang profile above sampled at dt, plus a short
/// capture tail that zeroes the residual heading error left by time
/// discretization. The caller is expected to have brought the robot to
/// translational rest. Empty when the headings already agree.
inline std::vector<Twist> switch_maneuver(const RobotState& state, double new_path_heading,
                                          const RobotLimits& limits, double dt = 0.05) {
    std::vector<Twist> cmds;
    const double dtheta = wrap_angle(new_path_heading - state.pose.theta);
    if (std::abs(dtheta) < 1e-9 && std::abs(state.twist.omega) < 1e-9) return cmds;

    const SwitchProfile prof = compute_switch_profile(dtheta, limits);
    RobotState sim = state;
    sim.twist.v = 0.0;

    const int steps = static_cast<int>(std::ceil(prof.duration() / dt));
    for (int k = 1; k <= steps; ++k) {
        const Twist cmd{0.0, prof.omega_at(std::min(k * dt, prof.duration()))};
        sim = step_robot(sim, cmd, dt, limits);
        cmds.push_back(sim.twist);
    }
    // capture tail: proportional heading correction, geometric convergence
    const double k_capture = std::min(10.0, 0.5 / dt);
    for (int k = 0; k < 600; ++k) {
        const double err = wrap_angle(new_path_heading - sim.pose.theta);
        if (std::abs(err) < 1e-9 && std::abs(sim.twist.omega) < 1e-9) break;
        const Twist cmd{0.0, clamp(k_capture * err, -limits.omega_max, limits.omega_max)};
        sim = step_robot(sim, cmd, dt, limits);
        cmds.push_back(sim.twist);
    }
    return cmds;
}

} // namespace seqbit
