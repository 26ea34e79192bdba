#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "seqbit/geometry.hpp"

namespace seqbit {

/// Natural cubic spline through a sequence of waypoints, parameterized by
/// cumulative chord length, with a numeric arc-length table for s <-> u
/// conversion.
class SplinePath {
public:
    /// Interpolating natural cubic spline (zero second derivative at the ends).
    /// Requires at least 2 waypoints and no consecutive duplicates.
    static SplinePath fit(const std::vector<Point2>& waypoints) {
        if (waypoints.size() < 2)
            throw std::invalid_argument("SplinePath: need at least 2 waypoints");
        SplinePath sp;
        sp.knots_ = waypoints;
        const std::size_t n = waypoints.size();
        sp.u_.resize(n);
        sp.u_[0] = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            const double d = dist(waypoints[i], waypoints[i - 1]);
            if (d <= 1e-12)
                throw std::invalid_argument("SplinePath: consecutive duplicate waypoints");
            sp.u_[i] = sp.u_[i - 1] + d;
        }
        sp.mx_ = solve_second_derivs(sp.u_, waypoints, /*axis_y=*/false);
        sp.my_ = solve_second_derivs(sp.u_, waypoints, /*axis_y=*/true);
        sp.build_arclength_table();
        return sp;
    }

    std::size_t num_knots() const { return knots_.size(); }
    const std::vector<Point2>& knots() const { return knots_; }
    double param_length() const { return u_.back(); }
    double total_length() const { return arc_s_.back(); }
    double knot_param(std::size_t i) const { return u_[i]; }

    Point2 eval(double u) const {
        const auto [i, h, a, b] = locate(u);
        const double x = a * knots_[i].x + b * knots_[i + 1].x +
                         ((a * a * a - a) * mx_[i] + (b * b * b - b) * mx_[i + 1]) * h * h / 6.0;
        const double y = a * knots_[i].y + b * knots_[i + 1].y +
                         ((a * a * a - a) * my_[i] + (b * b * b - b) * my_[i + 1]) * h * h / 6.0;
        return {x, y};
    }

    Point2 deriv(double u) const {
        const auto [i, h, a, b] = locate(u);
        const double dx = (knots_[i + 1].x - knots_[i].x) / h -
                          (3.0 * a * a - 1.0) / 6.0 * h * mx_[i] + (3.0 * b * b - 1.0) / 6.0 * h * mx_[i + 1];
        const double dy = (knots_[i + 1].y - knots_[i].y) / h -
                          (3.0 * a * a - 1.0) / 6.0 * h * my_[i] + (3.0 * b * b - 1.0) / 6.0 * h * my_[i + 1];
        return {dx, dy};
    }

    Point2 second_deriv(double u) const {
        const auto [i, h, a, b] = locate(u);
        return {a * mx_[i] + b * mx_[i + 1], a * my_[i] + b * my_[i + 1]};
    }

    /// Signed curvature at parameter u: (x'y'' - y'x'') / |r'|^3. Invariant
    /// under reparameterization, so this equals the arc-length curvature.
    double curvature_at_param(double u) const {
        const Point2 d1 = deriv(u);
        const Point2 d2 = second_deriv(u);
        const double speed = d1.norm();
        if (speed < 1e-12) return 0.0;
        return d1.cross(d2) / (speed * speed * speed);
    }

    /// Spline parameter at arc length s (monotone table + local refinement).
    double param_at_length(double s) const {
        if (s <= 0.0) return 0.0;
        if (s >= arc_s_.back()) return u_.back();
        const auto it = std::upper_bound(arc_s_.begin(), arc_s_.end(), s);
        const std::size_t k = static_cast<std::size_t>(it - arc_s_.begin()) - 1;
        const double s0 = arc_s_[k], s1 = arc_s_[k + 1];
        const double w = (s - s0) / std::max(1e-300, s1 - s0);
        return arc_u_[k] + w * (arc_u_[k + 1] - arc_u_[k]);
    }

    double length_at_param(double u) const {
        if (u <= 0.0) return 0.0;
        if (u >= u_.back()) return arc_s_.back();
        const auto it = std::upper_bound(arc_u_.begin(), arc_u_.end(), u);
        const std::size_t k = static_cast<std::size_t>(it - arc_u_.begin()) - 1;
        const double w = (u - arc_u_[k]) / std::max(1e-300, arc_u_[k + 1] - arc_u_[k]);
        return arc_s_[k] + w * (arc_s_[k + 1] - arc_s_[k]);
    }

    Point2 eval_at_length(double s) const { return eval(param_at_length(s)); }

    /// Curvature as a function of arc length.
    double curvature(double s) const { return curvature_at_param(param_at_length(s)); }

    /// Path tangent heading at arc length s.
    double heading(double s) const {
        const Point2 d = deriv(param_at_length(s));
        return std::atan2(d.y, d.x);
    }

private:
    std::vector<Point2> knots_;
    std::vector<double> u_;        // chord-length parameter at knots
    std::vector<double> mx_, my_;  // second derivatives at knots
    std::vector<double> arc_u_, arc_s_;

    struct Locator {
        std::size_t i;
        double h, a, b;
    };

    Locator locate(double u) const {
        const std::size_t n = u_.size();
        std::size_t i;
        if (u <= u_.front()) {
            i = 0;
        } else if (u >= u_.back()) {
            i = n - 2;
        } else {
            i = static_cast<std::size_t>(std::upper_bound(u_.begin(), u_.end(), u) - u_.begin()) - 1;
            if (i > n - 2) i = n - 2;
        }
        const double h = u_[i + 1] - u_[i];
        const double a = (u_[i + 1] - u) / h;
        const double b = (u - u_[i]) / h;
        return {i, h, a, b};
    }

    static std::vector<double> solve_second_derivs(const std::vector<double>& u,
                                                   const std::vector<Point2>& p, bool axis_y) {
        const std::size_t n = u.size();
        std::vector<double> m(n, 0.0);
        if (n == 2) return m;  // straight segment
        auto val = [&](std::size_t i) { return axis_y ? p[i].y : p[i].x; };
        // Thomas algorithm on the natural-spline tridiagonal system.
        std::vector<double> c(n, 0.0), rhs(n, 0.0);
        std::vector<double> diag(n, 1.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = u[i] - u[i - 1];
            const double h1 = u[i + 1] - u[i];
            diag[i] = 2.0 * (h0 + h1);
            rhs[i] = 6.0 * ((val(i + 1) - val(i)) / h1 - (val(i) - val(i - 1)) / h0);
        }
        // forward sweep (sub/super diagonals are the interval widths)
        std::vector<double> cp(n, 0.0), dp(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = u[i] - u[i - 1];
            const double h1 = u[i + 1] - u[i];
            const double sub = (i == 1) ? 0.0 : h0;
            const double denom = diag[i] - sub * cp[i - 1];
            cp[i] = h1 / denom;
            dp[i] = (rhs[i] - sub * dp[i - 1]) / denom;
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            m[i] = dp[i] - cp[i] * m[i + 1];
            if (i == 1) break;
        }
        return m;
    }

    double speed(double u) const { return deriv(u).norm(); }

    static double simpson(double fa, double fm, double fb, double h) {
        return h / 6.0 * (fa + 4.0 * fm + fb);
    }

    double adaptive_arc(double ua, double ub, double fa, double fb, double fm, double whole,
                        double tol, int depth) const {
        const double um = 0.5 * (ua + ub);
        const double fl = speed(0.5 * (ua + um));
        const double fr = speed(0.5 * (um + ub));
        const double left = simpson(fa, fl, fm, um - ua);
        const double right = simpson(fm, fr, fb, ub - um);
        if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
            return left + right + (left + right - whole) / 15.0;
        return adaptive_arc(ua, um, fa, fm, fl, left, 0.5 * tol, depth - 1) +
               adaptive_arc(um, ub, fm, fb, fr, right, 0.5 * tol, depth - 1);
    }

    void build_arclength_table() {
        // Fine parameter grid (at least 16 nodes per knot interval) with
        // adaptive-Simpson lengths per cell, tolerance 1e-6.
        const std::size_t cells_per_span = 16;
        arc_u_.clear();
        arc_s_.clear();
        arc_u_.push_back(0.0);
        arc_s_.push_back(0.0);
        for (std::size_t i = 0; i + 1 < u_.size(); ++i) {
            const double ua = u_[i], ub = u_[i + 1];
            for (std::size_t k = 0; k < cells_per_span; ++k) {
                const double a = ua + (ub - ua) * static_cast<double>(k) / cells_per_span;
                const double b = ua + (ub - ua) * static_cast<double>(k + 1) / cells_per_span;
                const double fa = speed(a), fb = speed(b), fm = speed(0.5 * (a + b));
                const double whole = simpson(fa, fm, fb, b - a);
                const double len = adaptive_arc(a, b, fa, fb, fm, whole, 1e-6 / cells_per_span, 20);
                arc_u_.push_back(b);
                arc_s_.push_back(arc_s_.back() + len);
            }
        }
    }
};

/// Spec-style free functions.
inline SplinePath fit_spline(const std::vector<Point2>& waypoints) { return SplinePath::fit(waypoints); }
inline double curvature(const SplinePath& p, double s) { return p.curvature(s); }

} // namespace seqbit
