#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <future>
#include <thread>

#include "seqbit/bitstar.hpp"
#include "support/test_maps.hpp"

using namespace seqbit;
using namespace seqbit::testsupport;

namespace {

World empty_world() {
    World w;
    w.bounds = {{7.5, 5.5}, 7.5, 5.5};
    return w;
}

PlannerConfig cfg_batches(int batches, std::uint64_t seed, double radius = 0.0) {
    PlannerConfig cfg;
    cfg.batch_size = 100;
    cfg.max_batches = batches;
    cfg.rng_seed = seed;
    cfg.robot_radius = radius;
    return cfg;
}

} // namespace

TEST_CASE("heuristic is the Euclidean distance") {
    CHECK(heuristic_cost({0, 0}, {3, 4}) == Catch::Approx(5.0));
    CHECK(heuristic_cost({2, 2}, {2, 2}) == Catch::Approx(0.0));
}

TEST_CASE("empty arena converges near the straight line") {
    const World w = empty_world();
    const SceneSnapshot scene(w, 0.0);
    const PlanResult res = plan(scene, {1, 1}, {14, 10}, cfg_batches(10, 7));
    REQUIRE(res.ok());
    const double straight = std::hypot(13.0, 9.0);
    CHECK(res.solution.cost >= straight - 1e-9);
    CHECK(res.solution.cost <= 1.02 * straight);
}

TEST_CASE("identical queries return identical solutions") {
    Rng map_rng(55);
    const RectMap m = random_rect_map(map_rng, 4);
    const SceneSnapshot scene(m.world, 0.0);
    const PlanResult a = plan(scene, m.start, m.goal, cfg_batches(6, 123));
    const PlanResult b = plan(scene, m.start, m.goal, cfg_batches(6, 123));
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    REQUIRE(a.solution.waypoints.size() == b.solution.waypoints.size());
    for (std::size_t i = 0; i < a.solution.waypoints.size(); ++i) {
        CHECK(a.solution.waypoints[i].x == b.solution.waypoints[i].x);
        CHECK(a.solution.waypoints[i].y == b.solution.waypoints[i].y);
    }
    CHECK(a.solution.cost == b.solution.cost);
    CHECK(a.solution.per_batch_costs == b.solution.per_batch_costs);
}

TEST_CASE("goal equal to start is a zero-cost single waypoint") {
    const World w = empty_world();
    const SceneSnapshot scene(w, 0.0);
    const PlanResult res = plan(scene, {3, 3}, {3, 3}, cfg_batches(1, 1));
    REQUIRE(res.ok());
    CHECK(res.solution.cost == 0.0);
    CHECK(res.solution.waypoints.size() == 1);
}

TEST_CASE("queries in collision are rejected as InvalidQuery") {
    World w = empty_world();
    w.statics.push_back({{5, 5}, 1, 1});
    const SceneSnapshot scene(w, 0.0);
    CHECK(plan(scene, {5, 5}, {10, 10}, cfg_batches(1, 1)).status == PlanStatus::InvalidQuery);
    CHECK(plan(scene, {1, 1}, {5.3, 4.8}, cfg_batches(1, 1)).status == PlanStatus::InvalidQuery);
    CHECK(plan(scene, {-1, 1}, {10, 10}, cfg_batches(1, 1)).status == PlanStatus::InvalidQuery);
}

TEST_CASE("fully blocked maps report NoPath") {
    World w = empty_world();
    w.statics.push_back({{7.5, 5.5}, 0.8, 5.5});  // full-height wall
    const SceneSnapshot scene(w, 0.0);
    const PlanResult res = plan(scene, {2, 5.5}, {13, 5.5}, cfg_batches(3, 5));
    CHECK(res.status == PlanStatus::NoPath);
}

TEST_CASE("wall with a gap: path uses the gap and tracks the oracle") {
    World w = empty_world();
    // wall at x=7.5 with a gap y in [5, 6.2]
    w.statics.push_back({{7.5, 2.5}, 0.4, 2.5});   // y [0, 5]
    w.statics.push_back({{7.5, 8.6}, 0.4, 2.4});   // y [6.2, 11]
    const SceneSnapshot scene(w, 0.0);
    const Point2 start{2, 5.5}, goal{13, 5.5};
    const PlanResult res = plan(scene, start, goal, cfg_batches(14, 3));
    REQUIRE(res.ok());
    CHECK(res.solution.cost >= dist(start, goal) - 1e-9);
    const auto oracle = visibility_shortest_path(start, goal, w.statics, w.bounds);
    REQUIRE(oracle.has_value());
    CHECK(res.solution.cost <= 1.03 * *oracle);
    // the polyline actually passes through the gap band
    bool in_gap = false;
    for (const auto& p : res.solution.waypoints)
        if (std::abs(p.x - 7.5) < 0.41 && p.y > 5.0 && p.y < 6.2) in_gap = true;
    for (std::size_t i = 1; i < res.solution.waypoints.size() && !in_gap; ++i) {
        const Point2 a = res.solution.waypoints[i - 1], b = res.solution.waypoints[i];
        if ((a.x - 7.5) * (b.x - 7.5) < 0.0) in_gap = true;  // crosses the wall plane via the gap
    }
    CHECK(in_gap);
}

TEST_CASE("per-batch costs are non-increasing and the heuristic is admissible") {
    Rng map_rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        const RectMap m = random_rect_map(map_rng, 5);
        const SceneSnapshot scene(m.world, 0.0);
        const PlanResult res = plan(scene, m.start, m.goal, cfg_batches(8, 100 + trial));
        REQUIRE(res.ok());
        const auto& costs = res.solution.per_batch_costs;
        for (std::size_t i = 1; i < costs.size(); ++i) REQUIRE(costs[i] <= costs[i - 1] + 1e-12);
        CHECK(heuristic_cost(m.start, m.goal) <= res.solution.cost + 1e-9);
    }
}

TEST_CASE("solution polylines are collision free when densely resampled") {
    Rng map_rng(13);
    for (int trial = 0; trial < 8; ++trial) {
        const RectMap m = random_rect_map(map_rng, 5);
        const SceneSnapshot scene(m.world, 0.0);
        PlannerConfig cfg = cfg_batches(6, 200 + trial, 0.2);
        const PlanResult res = plan(scene, m.start, m.goal, cfg);
        if (!res.ok()) continue;  // radius-inflated query may be blocked
        const auto& wp = res.solution.waypoints;
        for (std::size_t i = 1; i < wp.size(); ++i) {
            const double len = dist(wp[i - 1], wp[i]);
            const int n = std::max(2, static_cast<int>(len / (cfg.edge_check_resolution / 10.0)));
            for (int k = 0; k <= n; ++k) {
                const Point2 p = wp[i - 1] + (wp[i] - wp[i - 1]) * (static_cast<double>(k) / n);
                REQUIRE(scene.point_free(p, cfg.robot_radius - 1e-9));
            }
        }
    }
}

TEST_CASE("after the first solution all samples satisfy the informed inequality") {
    const World w = empty_world();
    const SceneSnapshot scene(w, 0.0);
    const Point2 start{2, 2}, goal{13, 9};
    PlannerConfig cfg = cfg_batches(8, 42);
    bool solution_seen = false;
    bool all_informed = true;
    cfg.on_sample = [&](const Point2& p, double c_best) {
        if (std::isfinite(c_best)) {
            solution_seen = true;
            if (dist(p, start) + dist(p, goal) > c_best + 1e-9) all_informed = false;
        }
    };
    const PlanResult res = plan(scene, start, goal, cfg);
    REQUIRE(res.ok());
    CHECK(solution_seen);
    CHECK(all_informed);
}

TEST_CASE("an already-optimal solution is a fixed point of further batches") {
    const World w = empty_world();
    const SceneSnapshot scene(w, 0.0);
    BitStarPlanner planner(scene, {2, 5}, {12, 5}, cfg_batches(20, 9));
    int solved_at = -1;
    for (int b = 0; b < 20; ++b) {
        planner.run_batch();
        if (solved_at < 0 && planner.has_solution()) solved_at = b;
    }
    REQUIRE(planner.has_solution());
    const auto& costs = planner.per_batch_costs();
    // once near-optimal, extra batches change nothing beyond sampling noise
    CHECK(costs.back() <= 1.01 * 10.0);
    CHECK(costs.back() >= 10.0 - 1e-9);
}

TEST_CASE("concurrent planner instances over one snapshot match sequential runs") {
    Rng map_rng(31);
    const RectMap m = random_rect_map(map_rng, 4);
    const SceneSnapshot scene(m.world, 0.0);

    std::vector<PlanResult> sequential;
    for (int i = 0; i < 4; ++i)
        sequential.push_back(plan(scene, m.start, m.goal, cfg_batches(5, 500 + i)));

    std::vector<std::future<PlanResult>> futs;
    for (int i = 0; i < 4; ++i)
        futs.push_back(std::async(std::launch::async, [&, i] {
            return plan(scene, m.start, m.goal, cfg_batches(5, 500 + i));
        }));
    for (int i = 0; i < 4; ++i) {
        const PlanResult par = futs[i].get();
        REQUIRE(par.status == sequential[i].status);
        if (par.ok()) {
            CHECK(par.solution.cost == sequential[i].solution.cost);
            REQUIRE(par.solution.waypoints.size() == sequential[i].solution.waypoints.size());
        }
    }
}
