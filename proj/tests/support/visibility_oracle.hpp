#pragma once

// Test-side oracle: exact shortest path for a point among axis-aligned
// rectangles via a corner visibility graph and Dijkstra. Blocking is decided
// by Liang-Barsky clipping against the open rectangle interiors, a different
// route than the distance-based checks inside the library.

#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "seqbit/geometry.hpp"

namespace seqbit::testsupport {

inline bool segment_blocked(const Point2& a, const Point2& b, const AxisRect& r) {
    double t0 = 0.0, t1 = 1.0;
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x - r.xmin(), r.xmax() - a.x, a.y - r.ymin(), r.ymax() - a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;
        } else {
            const double t = q[i] / p[i];
            if (p[i] < 0.0) {
                if (t > t1) return false;
                if (t > t0) t0 = t;
            } else {
                if (t < t0) return false;
                if (t < t1) t1 = t;
            }
        }
    }
    if (t1 - t0 < 1e-12) return false;  // grazing contact only
    const Point2 mid = a + (b - a) * (0.5 * (t0 + t1));
    const double eps = 1e-9;
    return mid.x > r.xmin() + eps && mid.x < r.xmax() - eps && mid.y > r.ymin() + eps &&
           mid.y < r.ymax() - eps;
}

/// Exact shortest collision-free cost from start to goal among `rects` inside
/// `bounds`, or nullopt when disconnected.
inline std::optional<double> visibility_shortest_path(const Point2& start, const Point2& goal,
                                                      const std::vector<AxisRect>& rects,
                                                      const AxisRect& bounds) {
    std::vector<Point2> nodes{start, goal};
    for (const auto& r : rects) {
        const Point2 corners[4] = {{r.xmin(), r.ymin()}, {r.xmax(), r.ymin()},
                                   {r.xmax(), r.ymax()}, {r.xmin(), r.ymax()}};
        for (const auto& c : corners) {
            if (!bounds.contains(c)) continue;
            bool interior = false;
            for (const auto& other : rects) {
                const double eps = 1e-9;
                if (c.x > other.xmin() + eps && c.x < other.xmax() - eps &&
                    c.y > other.ymin() + eps && c.y < other.ymax() - eps) {
                    interior = true;
                    break;
                }
            }
            if (!interior) nodes.push_back(c);
        }
    }

    const std::size_t n = nodes.size();
    auto visible = [&](std::size_t i, std::size_t j) {
        for (const auto& r : rects)
            if (segment_blocked(nodes[i], nodes[j], r)) return false;
        return true;
    };

    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    using QE = std::pair<double, std::size_t>;
    std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
    best[0] = 0.0;
    pq.push({0.0, 0});
    while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        if (d > best[u]) continue;
        if (u == 1) return d;
        for (std::size_t v = 0; v < n; ++v) {
            if (v == u) continue;
            const double w = dist(nodes[u], nodes[v]);
            if (best[u] + w >= best[v]) continue;
            if (!visible(u, v)) continue;
            best[v] = best[u] + w;
            pq.push({best[v], v});
        }
    }
    return std::nullopt;
}

} // namespace seqbit::testsupport
