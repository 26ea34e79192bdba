// Command-line runner: single simulations, 30-run benchmarks and path plots
// for the sequential planner and the velocity-space baseline.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "seqbit/scenario.hpp"
#include "seqbit/sim.hpp"
#include "seqbit/svg.hpp"

namespace fs = std::filesystem;
using namespace seqbit;

namespace {

std::string resolve_scenario_path(const std::string& arg) {
    for (const std::string cand : {arg, arg + ".scn", "scenarios/" + arg, "scenarios/" + arg + ".scn"}) {
        if (fs::exists(cand)) return cand;
    }
    return arg;  // let the loader produce the diagnostic
}

bool parse_planner(const std::string& name, PlannerKind& kind) {
    if (name == "seqbit") {
        kind = PlannerKind::SeqBit;
        return true;
    }
    if (name == "dovs") {
        kind = PlannerKind::Dovs;
        return true;
    }
    return false;
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::vector<RunResult> run_batch_parallel(const Scenario& sc, PlannerKind kind,
                                          std::uint64_t base_seed, int runs) {
    std::vector<RunResult> results(runs);
    std::atomic<int> next{0};
    const unsigned workers =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()), runs);
    std::vector<std::future<void>> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.push_back(std::async(std::launch::async, [&] {
            for (int i = next.fetch_add(1); i < runs; i = next.fetch_add(1))
                results[i] = run(sc, kind, base_seed + static_cast<std::uint64_t>(i));
        }));
    }
    for (auto& f : pool) f.get();
    return results;
}

std::string csv_row(const std::string& planner, std::size_t n_dynamic, const AggregateStats& st) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%s,%zu,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", planner.c_str(),
                  n_dynamic, st.path_length_mean, st.path_length_std, st.plan_time_mean,
                  st.plan_time_std, st.time_to_goal_mean, st.time_to_goal_std, st.failure_rate);
    return buf;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential batched-informed replanning vs a velocity-obstacle baseline"};
    app.require_subcommand(1);

    // run
    std::string run_scenario, run_planner = "seqbit", run_out = ".";
    std::uint64_t run_seed = 1;
    double run_dt = -1.0, run_tmax = -1.0;
    auto* cmd_run = app.add_subcommand("run", "Simulate one run and write trace + SVG");
    cmd_run->add_option("scenario", run_scenario, "Scenario file or bundled name")->required();
    cmd_run->add_option("--planner", run_planner, "seqbit|dovs");
    cmd_run->add_option("--seed", run_seed, "RNG seed");
    cmd_run->add_option("--out", run_out, "Output directory");
    cmd_run->add_option("--dt", run_dt, "Simulation step override, s");
    cmd_run->add_option("--tmax", run_tmax, "Simulation horizon override, s");

    // bench
    std::vector<std::string> bench_scenarios;
    std::string bench_planners = "seqbit,dovs", bench_out;
    std::uint64_t bench_seed = 1;
    int bench_runs = 30;
    double bench_dt = -1.0, bench_tmax = -1.0;
    auto* cmd_bench = app.add_subcommand("bench", "Aggregate statistics over seeded runs");
    cmd_bench->add_option("scenarios", bench_scenarios, "Scenario files or bundled names")->required();
    cmd_bench->add_option("--planners", bench_planners, "Comma-separated planner list");
    cmd_bench->add_option("--runs", bench_runs, "Runs per (planner, scenario)");
    cmd_bench->add_option("--seed", bench_seed, "Base seed; run i uses seed+i");
    cmd_bench->add_option("--out", bench_out, "Directory for bench.csv (stdout always)");
    cmd_bench->add_option("--dt", bench_dt, "Simulation step override, s");
    cmd_bench->add_option("--tmax", bench_tmax, "Simulation horizon override, s");

    // plot
    std::string plot_trace, plot_scenario, plot_out;
    auto* cmd_plot = app.add_subcommand("plot", "Render a trace log to SVG");
    cmd_plot->add_option("trace", plot_trace, "Trace log from `run`")->required();
    cmd_plot->add_option("--scenario", plot_scenario, "Scenario file for obstacle geometry");
    cmd_plot->add_option("--out", plot_out, "Output SVG path (default: trace with .svg)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            PlannerKind kind;
            if (!parse_planner(run_planner, kind)) {
                std::cerr << "error: unknown planner '" << run_planner << "'\n";
                return 1;
            }
            Scenario sc = load_scenario_file(resolve_scenario_path(run_scenario));
            if (run_dt > 0.0) sc.sim.dt = run_dt;
            if (run_tmax > 0.0) sc.sim.t_max = run_tmax;

            const RunResult res = run(sc, kind, run_seed);

            std::ostringstream stem;
            stem << sc.name << "_" << to_string(kind) << "_seed" << run_seed;
            const fs::path trace_path = fs::path(run_out) / (stem.str() + ".trace.csv");
            const fs::path svg_path = fs::path(run_out) / (stem.str() + ".svg");
            write_file(trace_path, serialize_trace(res.trace));
            write_file(svg_path, render_trace_svg(&sc, res.trace, virtuals_from_trace(res.trace)));

            std::printf(
                "%s %s seed=%llu outcome=%s path_length=%.3f plan_time=%.4f time_to_goal=%.2f "
                "virtuals=%d min_clearance=%.3f\n",
                sc.name.c_str(), to_string(kind), static_cast<unsigned long long>(run_seed),
                to_string(res.outcome), res.path_length, res.plan_time, res.time_to_goal,
                res.virtuals_used, res.min_clearance);
            switch (res.outcome) {
                case Outcome::Reached: return 0;
                case Outcome::Crashed: return 2;
                default: return 3;
            }
        }

        if (cmd_bench->parsed()) {
            std::vector<PlannerKind> kinds;
            std::stringstream ps(bench_planners);
            std::string tok;
            while (std::getline(ps, tok, ',')) {
                PlannerKind k;
                if (!parse_planner(tok, k)) {
                    std::cerr << "error: unknown planner '" << tok << "'\n";
                    return 1;
                }
                kinds.push_back(k);
            }
            std::string csv =
                "planner,n_dynamic,path_length_mean,path_length_std,plan_time_mean,plan_time_std,"
                "time_to_goal_mean,time_to_goal_std,failure_rate\n";
            for (PlannerKind k : kinds) {
                for (const auto& name : bench_scenarios) {
                    Scenario sc = load_scenario_file(resolve_scenario_path(name));
                    if (bench_dt > 0.0) sc.sim.dt = bench_dt;
                    if (bench_tmax > 0.0) sc.sim.t_max = bench_tmax;
                    const int runs = bench_runs > 0 ? bench_runs : sc.sim.runs;
                    const auto results = run_batch_parallel(sc, k, bench_seed, runs);
                    csv += csv_row(to_string(k), sc.world.dynamics.size(), aggregate(results));
                }
            }
            std::fputs(csv.c_str(), stdout);
            if (!bench_out.empty()) write_file(fs::path(bench_out) / "bench.csv", csv);
            return 0;
        }

        if (cmd_plot->parsed()) {
            std::ifstream in(plot_trace, std::ios::binary);
            if (!in) {
                std::cerr << "error: cannot open trace '" << plot_trace << "'\n";
                return 1;
            }
            std::ostringstream ss;
            ss << in.rdbuf();
            const std::vector<TraceRow> trace = parse_trace(ss.str());
            Scenario sc;
            const Scenario* scp = nullptr;
            if (!plot_scenario.empty()) {
                sc = load_scenario_file(resolve_scenario_path(plot_scenario));
                scp = &sc;
            }
            const std::string svg = render_trace_svg(scp, trace, virtuals_from_trace(trace));
            fs::path out = plot_out.empty() ? fs::path(plot_trace).replace_extension(".svg")
                                            : fs::path(plot_out);
            write_file(out, svg);
            std::printf("wrote %s\n", out.string().c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
