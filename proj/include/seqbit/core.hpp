#pragma once

#include <cmath>

namespace seqbit {

/// Planar configuration of a differential-drive body.
struct Pose2D {
    double x = 0.0;      ///< meters
    double y = 0.0;      ///< meters
    double theta = 0.0;  ///< radians
};

/// Velocity command pair (linear, angular) of a differential drive.
struct Twist {
    double v = 0.0;      ///< m/s
    double omega = 0.0;  ///< rad/s
};

/// Kinematic and acceleration limits of the robot.
struct RobotLimits {
    double v_max = 0.4;      ///< m/s
    double omega_max = 0.4;  ///< rad/s
    double a_max = 0.4;      ///< m/s^2
    double alpha_max = 1.0;  ///< rad/s^2
};

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    return a;
}

inline double clamp(double x, double lo, double hi) {
    return x < lo ? lo : (x > hi ? hi : x);
}

} // namespace seqbit
