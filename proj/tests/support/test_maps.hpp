#pragma once

// Shared random-map generation for planner tests.

#include <optional>
#include <vector>

#include "seqbit/rng.hpp"
#include "seqbit/world.hpp"
#include "visibility_oracle.hpp"

namespace seqbit::testsupport {

struct RectMap {
    World world;
    Point2 start;
    Point2 goal;
    double oracle_cost = 0.0;
};

/// Random arena with up to max_rects rectangles and a solvable point query;
/// regenerates until the visibility oracle confirms a path with some slack.
inline RectMap random_rect_map(Rng& rng, int max_rects) {
    for (;;) {
        RectMap m;
        m.world.bounds = {{7.5, 5.5}, 7.5, 5.5};
        const int n = 1 + static_cast<int>(rng.uniform(0, max_rects));
        for (int i = 0; i < n; ++i) {
            const double hw = rng.uniform(0.4, 1.6);
            const double hh = rng.uniform(0.4, 1.6);
            const double cx = rng.uniform(hw + 0.2, 15.0 - hw - 0.2);
            const double cy = rng.uniform(hh + 0.2, 11.0 - hh - 0.2);
            m.world.statics.push_back({{cx, cy}, hw, hh});
        }
        auto free_pt = [&](const Point2& p) {
            for (const auto& r : m.world.statics)
                if (dist_point_rect(p, r) < 0.15) return false;
            return true;
        };
        m.start = {rng.uniform(0.3, 2.5), rng.uniform(0.3, 10.7)};
        m.goal = {rng.uniform(12.5, 14.7), rng.uniform(0.3, 10.7)};
        if (!free_pt(m.start) || !free_pt(m.goal)) continue;
        const auto cost =
            visibility_shortest_path(m.start, m.goal, m.world.statics, m.world.bounds);
        if (!cost) continue;
        m.oracle_cost = *cost;
        return m;
    }
}

} // namespace seqbit::testsupport
