#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "seqbit/scenario.hpp"
#include "seqbit/sim.hpp"

namespace seqbit {

/// Minimal deterministic SVG emitter; fixed float formatting keeps the byte
/// output a pure function of the drawn content.
class SvgCanvas {
public:
    SvgCanvas(const AxisRect& world_box, double px_per_m = 40.0, double margin_m = 0.5)
        : box_(world_box), scale_(px_per_m), margin_(margin_m) {
        width_ = (2.0 * box_.half_width + 2.0 * margin_) * scale_;
        height_ = (2.0 * box_.half_height + 2.0 * margin_) * scale_;
    }

    double px(double x) const { return (x - box_.xmin() + margin_) * scale_; }
    double py(double y) const { return height_ - (y - box_.ymin() + margin_) * scale_; }

    void rect(const AxisRect& r, const std::string& style, const std::string& cls = "") {
        char buf[320];
        std::snprintf(buf, sizeof(buf),
                      "  <rect%s x=\"%.6g\" y=\"%.6g\" width=\"%.6g\" height=\"%.6g\" %s/>\n",
                      cls.empty() ? "" : (" class=\"" + cls + "\"").c_str(), px(r.xmin()),
                      py(r.ymax()), 2.0 * r.half_width * scale_, 2.0 * r.half_height * scale_,
                      style.c_str());
        body_ += buf;
    }

    void circle(const Point2& c, double radius_m, const std::string& style) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "  <circle cx=\"%.6g\" cy=\"%.6g\" r=\"%.6g\" %s/>\n",
                      px(c.x), py(c.y), radius_m * scale_, style.c_str());
        body_ += buf;
    }

    void polyline(const std::vector<Point2>& pts, const std::string& style) {
        if (pts.empty()) return;
        std::string d = "  <polyline points=\"";
        char buf[64];
        for (const auto& p : pts) {
            std::snprintf(buf, sizeof(buf), "%.6g,%.6g ", px(p.x), py(p.y));
            d += buf;
        }
        d += "\" ";
        d += style;
        d += "/>\n";
        body_ += d;
    }

    std::string finish() const {
        char head[256];
        std::snprintf(head, sizeof(head),
                      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.6g\" height=\"%.6g\" "
                      "viewBox=\"0 0 %.6g %.6g\">\n",
                      width_, height_, width_, height_);
        return std::string(head) + "  <rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
               body_ + "</svg>\n";
    }

private:
    AxisRect box_;
    double scale_, margin_, width_, height_;
    std::string body_;
};

/// Pull the virtual-obstacle squares out of a trace's VIRTUAL_ADDED events.
inline std::vector<AxisRect> virtuals_from_trace(const std::vector<TraceRow>& trace) {
    std::vector<AxisRect> out;
    for (const auto& row : trace) {
        std::size_t pos = 0;
        while ((pos = row.event.find("VIRTUAL_ADDED", pos)) != std::string::npos) {
            double cx = 0, cy = 0, h = 0;
            if (std::sscanf(row.event.c_str() + pos, "VIRTUAL_ADDED cx=%lf cy=%lf h=%lf", &cx,
                            &cy, &h) == 3)
                out.push_back({{cx, cy}, h, h});
            pos += 13;
        }
    }
    return out;
}

/// Fig-style path plot: arena outline, gray statics, dashed dynamic-obstacle
/// trajectories, blue virtual squares, red robot path and start/goal markers.
/// `scenario` may be null, in which case only the trace content is drawn.
inline std::string render_trace_svg(const Scenario* scenario, const std::vector<TraceRow>& trace,
                                    const std::vector<AxisRect>& virtuals) {
    AxisRect box{{7.5, 5.5}, 7.5, 5.5};
    if (scenario) {
        box = scenario->world.bounds;
    } else if (!trace.empty()) {
        double xmin = trace[0].pose.x, xmax = xmin, ymin = trace[0].pose.y, ymax = ymin;
        for (const auto& r : trace) {
            xmin = std::min(xmin, r.pose.x);
            xmax = std::max(xmax, r.pose.x);
            ymin = std::min(ymin, r.pose.y);
            ymax = std::max(ymax, r.pose.y);
        }
        box = {{0.5 * (xmin + xmax), 0.5 * (ymin + ymax)},
               std::max(1.0, 0.5 * (xmax - xmin)),
               std::max(1.0, 0.5 * (ymax - ymin))};
    }
    SvgCanvas svg(box);

    svg.rect(box, "fill=\"none\" stroke=\"black\" stroke-width=\"2\"");
    if (scenario) {
        for (const auto& s : scenario->world.statics)
            svg.rect(s, "fill=\"gray\" stroke=\"dimgray\"");
    }
    for (const auto& v : virtuals)
        svg.rect(v, "fill=\"blue\" fill-opacity=\"0.25\" stroke=\"blue\"", "virtual");
    if (scenario) {
        const double t_end = trace.empty() ? 0.0 : trace.back().t;
        for (const auto& d : scenario->world.dynamics) {
            std::vector<Point2> pts;
            const int n = std::max(2, static_cast<int>(t_end / 0.25) + 1);
            for (int k = 0; k <= n; ++k) {
                const Pose2D p = obstacle_pose_at(d, t_end * static_cast<double>(k) / n);
                pts.push_back({p.x, p.y});
            }
            svg.polyline(pts,
                         "fill=\"none\" stroke=\"darkorange\" stroke-dasharray=\"6,4\" "
                         "stroke-width=\"1.5\"");
            svg.circle({d.initial_pose.x, d.initial_pose.y}, d.radius,
                       "fill=\"none\" stroke=\"darkorange\" stroke-width=\"1.5\"");
        }
    }
    std::vector<Point2> path;
    path.reserve(trace.size());
    for (const auto& r : trace) path.push_back({r.pose.x, r.pose.y});
    svg.polyline(path, "fill=\"none\" stroke=\"red\" stroke-width=\"2\"");
    if (!trace.empty()) {
        svg.circle({trace.front().pose.x, trace.front().pose.y}, 0.12,
                   "fill=\"green\" stroke=\"none\"");
    }
    if (scenario) {
        svg.circle(scenario->robot.goal, 0.12, "fill=\"none\" stroke=\"green\" stroke-width=\"2\"");
    } else if (!trace.empty()) {
        svg.circle({trace.back().pose.x, trace.back().pose.y}, 0.12,
                   "fill=\"none\" stroke=\"green\" stroke-width=\"2\"");
    }
    return svg.finish();
}

} // namespace seqbit
