#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "seqbit/geometry.hpp"
#include "seqbit/rng.hpp"
#include "seqbit/world.hpp"

namespace seqbit {

struct PlannerConfig {
    int batch_size = 100;             ///< samples per batch, >= 1
    int max_batches = 10;
    double time_budget = 10.0;        ///< wall-clock guard, seconds; > 0
    double rewire_factor = 1.1;       ///< > 1, scales the RGG connection radius
    std::uint64_t rng_seed = 0;
    double edge_check_resolution = 0.05;  ///< m, used for curved-path re-checks
    double robot_radius = 0.0;        ///< planning inflation; 0 plans a point

    /// Stop at the end of the first batch that produced any solution
    /// (feasibility probe mode used by the replanner).
    bool first_solution_only = false;

    /// Test hook: observes every accepted sample with c_best at draw time.
    std::function<void(const Point2&, double)> on_sample;
};

struct PlannerSolution {
    std::vector<Point2> waypoints;       ///< start -> goal
    double cost = std::numeric_limits<double>::infinity();
    long samples_used = 0;
    int batches = 0;
    std::vector<double> per_batch_costs; ///< best cost after each batch, non-increasing
};

enum class PlanStatus { Solved, NoPath, InvalidQuery };

struct PlanResult {
    PlanStatus status = PlanStatus::NoPath;
    PlannerSolution solution;
    bool ok() const { return status == PlanStatus::Solved; }
};

/// Admissible Euclidean heuristic.
inline double heuristic_cost(const Point2& a, const Point2& b) { return dist(a, b); }

/// Batched informed anytime planner over an immutable SceneSnapshot.
///
/// Implicit random geometric graph searched with paired vertex/edge queues
/// ordered by estimated solution cost; samples are drawn from the informed
/// ellipse once a solution exists, the graph is pruned against the current
/// best cost, and the connection radius shrinks as the sample count grows.
/// Queue ties break on smaller goal heuristic, then insertion order, making a
/// run a pure function of (scene, query, config).
class BitStarPlanner {
public:
    BitStarPlanner(const SceneSnapshot& scene, Point2 start, Point2 goal, PlannerConfig cfg)
        : scene_(scene), start_(start), goal_(goal), cfg_(cfg), rng_(cfg.rng_seed) {
        Node s;
        s.p = start_;
        s.g = 0.0;
        s.state = NodeState::Vertex;
        s.batch = 0;
        nodes_.push_back(s);
        start_id_ = 0;

        Node g;
        g.p = goal_;
        g.state = NodeState::Sample;
        nodes_.push_back(g);
        goal_id_ = 1;
        samples_.push_back(goal_id_);
    }

    bool query_valid() const {
        return scene_.point_free(start_, cfg_.robot_radius) &&
               scene_.point_free(goal_, cfg_.robot_radius);
    }

    bool has_solution() const { return std::isfinite(best_cost()); }
    double best_cost() const { return nodes_[goal_id_].g; }
    int batches_run() const { return batch_count_; }
    long samples_used() const { return samples_used_; }
    const std::vector<double>& per_batch_costs() const { return per_batch_costs_; }

    /// One full batch: prune, sample, rebuild the vertex queue, then process
    /// the edge queue to exhaustion. Never increases the best cost.
    void run_batch() {
        ++batch_count_;
        prune();
        draw_samples();
        radius_ = connection_radius();
        rebuild_vertex_queue();

        while (true) {
            // expand vertices while they may produce a better edge than the
            // best queued edge
            while (true) {
                const auto v = peek_vertex();
                if (!v) break;
                const auto e = peek_edge();
                if (e && edge_key(*e) < vertex_key(*v)) break;
                pop_vertex();
                expand_vertex(v->id);
            }
            const auto e = peek_edge();
            if (!e) break;
            pop_edge();
            if (!process_edge(*e)) {
                clear_queues();
                break;
            }
        }
        per_batch_costs_.push_back(best_cost());
    }

    /// Best-so-far solution (valid only when has_solution()).
    PlannerSolution solution() const {
        PlannerSolution sol;
        sol.samples_used = samples_used_;
        sol.batches = batch_count_;
        sol.per_batch_costs = per_batch_costs_;
        if (!has_solution()) return sol;
        std::vector<Point2> rev;
        for (int id = goal_id_; id != -1; id = nodes_[id].parent) rev.push_back(nodes_[id].p);
        sol.waypoints.assign(rev.rbegin(), rev.rend());
        double c = 0.0;
        for (std::size_t i = 1; i < sol.waypoints.size(); ++i)
            c += dist(sol.waypoints[i - 1], sol.waypoints[i]);
        sol.cost = c;
        return sol;
    }

private:
    enum class NodeState { Sample, Vertex, Dead };

    struct Node {
        Point2 p;
        double g = std::numeric_limits<double>::infinity();
        int parent = -1;
        std::vector<int> children;
        NodeState state = NodeState::Sample;
        int batch = -1;  ///< batch in which the node joined the tree
    };

    struct VertexEntry {
        double key;
        double h;
        std::uint64_t seq;
        int id;
        double g_at_push;
    };
    struct EdgeEntry {
        double key;
        double h;
        std::uint64_t seq;
        int v;
        int x;
        double g_at_push;
    };
    template <typename E>
    struct EntryGreater {
        bool operator()(const E& a, const E& b) const {
            if (a.key != b.key) return a.key > b.key;
            if (a.h != b.h) return a.h > b.h;
            return a.seq > b.seq;
        }
    };

    const SceneSnapshot& scene_;
    Point2 start_, goal_;
    PlannerConfig cfg_;
    Rng rng_;
    std::vector<Node> nodes_;
    std::vector<int> samples_;  ///< ids currently unconnected
    int start_id_ = 0, goal_id_ = 1;
    int batch_count_ = 0;
    long samples_used_ = 0;
    double radius_ = std::numeric_limits<double>::infinity();
    std::uint64_t seq_ = 0;
    std::vector<double> per_batch_costs_;
    std::priority_queue<VertexEntry, std::vector<VertexEntry>, EntryGreater<VertexEntry>> qv_;
    std::priority_queue<EdgeEntry, std::vector<EdgeEntry>, EntryGreater<EdgeEntry>> qe_;

    double g_hat(int id) const { return dist(start_, nodes_[id].p); }
    double h_hat(int id) const { return dist(nodes_[id].p, goal_); }
    static double vertex_key(const VertexEntry& v) { return v.key; }
    static double edge_key(const EdgeEntry& e) { return e.key; }

    void clear_queues() {
        qv_ = {};
        qe_ = {};
    }

    double connection_radius() const {
        std::size_t live = samples_.size();
        for (const auto& n : nodes_)
            if (n.state == NodeState::Vertex) ++live;
        const double q = static_cast<double>(std::max<std::size_t>(live, 2));
        const AxisRect& b = scene_.bounds();
        const double arena = 4.0 * b.half_width * b.half_height;
        const double lam = std::min(informed_measure(best_cost(), dist(start_, goal_)), arena);
        return cfg_.rewire_factor * std::sqrt(3.0 * lam / M_PI * std::log(q) / q);
    }

    void draw_samples() {
        const double c_best = best_cost();
        const double c_min = dist(start_, goal_);
        int added = 0;
        long attempts = 0;
        const long cap = 400L * cfg_.batch_size;
        while (added < cfg_.batch_size && attempts < cap) {
            ++attempts;
            const Point2 p = std::isfinite(c_best)
                                 ? sample_informed(start_, goal_, c_best, scene_.bounds(), rng_)
                                 : sample_in_rect(scene_.bounds(), rng_);
            if (!scene_.point_free(p, cfg_.robot_radius)) continue;
            Node n;
            n.p = p;
            nodes_.push_back(n);
            samples_.push_back(static_cast<int>(nodes_.size()) - 1);
            ++added;
            if (cfg_.on_sample) cfg_.on_sample(p, c_best);
        }
        samples_used_ += added;
    }

    void rebuild_vertex_queue() {
        clear_queues();
        for (int id = 0; id < static_cast<int>(nodes_.size()); ++id)
            if (nodes_[id].state == NodeState::Vertex) push_vertex(id);
    }

    void push_vertex(int id) {
        const Node& n = nodes_[id];
        qv_.push({n.g + h_hat(id), h_hat(id), seq_++, id, n.g});
    }

    void push_edge(int v, int x) {
        const double c_hat = dist(nodes_[v].p, nodes_[x].p);
        qe_.push({nodes_[v].g + c_hat + h_hat(x), h_hat(x), seq_++, v, x, nodes_[v].g});
    }

    /// Top of the vertex queue with stale entries repaired (a vertex whose cost
    /// improved since push is re-queued with its current key).
    std::optional<VertexEntry> peek_vertex() {
        while (!qv_.empty()) {
            VertexEntry e = qv_.top();
            const Node& n = nodes_[e.id];
            if (n.state != NodeState::Vertex) {
                qv_.pop();
                continue;
            }
            if (n.g != e.g_at_push) {
                qv_.pop();
                push_vertex(e.id);
                continue;
            }
            return e;
        }
        return std::nullopt;
    }

    std::optional<EdgeEntry> peek_edge() {
        while (!qe_.empty()) {
            EdgeEntry e = qe_.top();
            const Node& v = nodes_[e.v];
            if (v.state != NodeState::Vertex || nodes_[e.x].state == NodeState::Dead) {
                qe_.pop();
                continue;
            }
            if (v.g != e.g_at_push) {
                qe_.pop();
                push_edge(e.v, e.x);
                continue;
            }
            return e;
        }
        return std::nullopt;
    }

    void pop_vertex() { qv_.pop(); }
    void pop_edge() { qe_.pop(); }

    void expand_vertex(int vid) {
        const Node& v = nodes_[vid];
        const double c_best = best_cost();
        for (int xid : samples_) {
            const double d = dist(v.p, nodes_[xid].p);
            if (d > radius_) continue;
            if (g_hat(vid) + d + h_hat(xid) < c_best) push_edge(vid, xid);
        }
        if (v.batch == batch_count_) {
            // vertex joined the tree this batch: consider rewiring edges into
            // existing vertices
            for (int wid = 0; wid < static_cast<int>(nodes_.size()); ++wid) {
                const Node& w = nodes_[wid];
                if (w.state != NodeState::Vertex || wid == vid) continue;
                const double d = dist(v.p, w.p);
                if (d > radius_) continue;
                if (g_hat(vid) + d + h_hat(wid) < c_best && v.g + d < w.g && w.parent != vid)
                    push_edge(vid, wid);
            }
        }
    }

    bool edge_collision_free(const Point2& a, const Point2& b) const {
        return scene_.segment_free({a, b}, cfg_.robot_radius);
    }

    /// Returns false when the best queue entry can no longer improve the
    /// solution, which ends the batch.
    bool process_edge(const EdgeEntry& e) {
        Node& v = nodes_[e.v];
        Node& x = nodes_[e.x];
        const double c_hat = dist(v.p, x.p);
        const double c_best = best_cost();
        if (!(v.g + c_hat + h_hat(e.x) < c_best)) return false;
        if (!(g_hat(e.v) + c_hat + h_hat(e.x) < c_best)) return true;  // stale, skip
        if (!edge_collision_free(v.p, x.p)) return true;
        const double c = c_hat;
        if (!(g_hat(e.v) + c + h_hat(e.x) < c_best)) return true;
        if (!(v.g + c < x.g)) return true;

        if (x.state == NodeState::Vertex) {
            // rewire: detach from the old parent
            Node& old = nodes_[x.parent];
            old.children.erase(std::find(old.children.begin(), old.children.end(), e.x));
        } else {
            samples_.erase(std::find(samples_.begin(), samples_.end(), e.x));
            x.state = NodeState::Vertex;
            x.batch = batch_count_;
            push_vertex(e.x);
        }
        x.parent = e.v;
        v.children.push_back(e.x);
        x.g = v.g + c;
        propagate_cost(e.x);
        return true;
    }

    void propagate_cost(int id) {
        for (int cid : nodes_[id].children) {
            nodes_[cid].g = nodes_[id].g + dist(nodes_[id].p, nodes_[cid].p);
            propagate_cost(cid);
        }
    }

    void prune() {
        const double c_best = best_cost();
        if (!std::isfinite(c_best)) return;
        const double eps = 1e-12;
        // unconnected samples that cannot improve the solution
        samples_.erase(std::remove_if(samples_.begin(), samples_.end(),
                                      [&](int id) {
                                          const bool drop =
                                              g_hat(id) + h_hat(id) >= c_best - eps;
                                          if (drop) nodes_[id].state = NodeState::Dead;
                                          return drop;
                                      }),
                       samples_.end());
        // peel useless leaves until fixpoint
        bool changed = true;
        while (changed) {
            changed = false;
            for (int id = 0; id < static_cast<int>(nodes_.size()); ++id) {
                Node& n = nodes_[id];
                if (n.state != NodeState::Vertex || id == start_id_ || id == goal_id_) continue;
                if (!n.children.empty()) continue;
                const double f_hat = g_hat(id) + h_hat(id);
                const bool useless_now = n.g + h_hat(id) > c_best + eps;
                if (!useless_now) continue;
                Node& par = nodes_[n.parent];
                par.children.erase(std::find(par.children.begin(), par.children.end(), id));
                n.parent = -1;
                n.g = std::numeric_limits<double>::infinity();
                if (f_hat < c_best - eps) {
                    n.state = NodeState::Sample;
                    samples_.push_back(id);
                } else {
                    n.state = NodeState::Dead;
                }
                changed = true;
            }
        }
    }
};

/// Run BIT* on a frozen scene. Start/goal must be collision free after
/// inflation by cfg.robot_radius; failure to find a path is reported as
/// NoPath, never thrown. The optional cancel flag is polled between batches.
inline PlanResult plan(const SceneSnapshot& scene, const Point2& start, const Point2& goal,
                       const PlannerConfig& cfg, const std::atomic<bool>* cancel = nullptr) {
    PlanResult res;
    BitStarPlanner planner(scene, start, goal, cfg);
    if (!planner.query_valid()) {
        res.status = PlanStatus::InvalidQuery;
        return res;
    }
    if (dist(start, goal) < 1e-9) {
        res.status = PlanStatus::Solved;
        res.solution.waypoints = {start};
        res.solution.cost = 0.0;
        return res;
    }
    const auto t0 = std::chrono::steady_clock::now();
    for (int b = 0; b < cfg.max_batches; ++b) {
        if (cancel && cancel->load(std::memory_order_relaxed)) break;
        planner.run_batch();
        if (cfg.first_solution_only && planner.has_solution()) break;
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (elapsed > cfg.time_budget) break;
    }
    if (!planner.has_solution()) {
        res.status = PlanStatus::NoPath;
        res.solution = planner.solution();
        return res;
    }
    res.status = PlanStatus::Solved;
    res.solution = planner.solution();
    return res;
}

} // namespace seqbit
