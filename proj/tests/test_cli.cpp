#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SEQBIT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string kScenarioDir = SEQBIT_SCENARIO_DIR;

} // namespace

TEST_CASE("run exits 0 on reached and writes trace plus SVG") {
    const fs::path out = fs::temp_directory_path() / "seqbit_cli_run";
    fs::remove_all(out);
    const int rc =
        run_cli("run " + kScenarioDir + "/empty.scn --planner seqbit --seed 7 --out " + out.string());
    CHECK(rc == 0);
    CHECK(fs::exists(out / "empty_seqbit_seed7.trace.csv"));
    CHECK(fs::exists(out / "empty_seqbit_seed7.svg"));
}

TEST_CASE("run exits 1 on a missing scenario") {
    CHECK(run_cli("run missing.scn --planner seqbit") == 1);
}

TEST_CASE("run exits 1 on an invalid scenario document") {
    const fs::path bad = fs::temp_directory_path() / "bad.scn";
    std::ofstream(bad) << "{\"bounds\": {\"w\": -3}}";
    CHECK(run_cli("run " + bad.string()) == 1);
}

TEST_CASE("plot renders a trace deterministically") {
    const fs::path out = fs::temp_directory_path() / "seqbit_cli_plot";
    fs::remove_all(out);
    REQUIRE(run_cli("run " + kScenarioDir + "/paper-1obs.scn --planner seqbit --seed 7 --out " +
                    out.string()) == 0);
    const fs::path trace = out / "paper-1obs_seqbit_seed7.trace.csv";
    REQUIRE(fs::exists(trace));

    const fs::path svg_a = out / "a.svg";
    const fs::path svg_b = out / "b.svg";
    REQUIRE(run_cli("plot " + trace.string() + " --scenario " + kScenarioDir +
                    "/paper-1obs.scn --out " + svg_a.string()) == 0);
    REQUIRE(run_cli("plot " + trace.string() + " --scenario " + kScenarioDir +
                    "/paper-1obs.scn --out " + svg_b.string()) == 0);
    const std::string a = slurp(svg_a), b = slurp(svg_b);
    CHECK(!a.empty());
    CHECK(a == b);

    // run's own SVG matches the plot-from-trace output as well
    CHECK(a == slurp(out / "paper-1obs_seqbit_seed7.svg"));
}

TEST_CASE("plot exits 1 on a malformed trace") {
    const fs::path bad = fs::temp_directory_path() / "bad_trace.csv";
    std::ofstream(bad) << "nonsense\n1,2,3\n";
    CHECK(run_cli("plot " + bad.string()) == 1);
}

TEST_CASE("bench emits one CSV row per planner/scenario with stable schema") {
    const fs::path out = fs::temp_directory_path() / "seqbit_cli_bench";
    fs::remove_all(out);
    const std::string cmd = std::string(SEQBIT_CLI_PATH) + " bench " + kScenarioDir +
                            "/empty.scn --planners seqbit,dovs --runs 2 --seed 5 --out " +
                            out.string() + " > /dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    const std::string csv = slurp(out / "bench.csv");
    std::istringstream in(csv);
    std::string header;
    REQUIRE(std::getline(in, header));
    CHECK(header ==
          "planner,n_dynamic,path_length_mean,path_length_std,plan_time_mean,plan_time_std,"
          "time_to_goal_mean,time_to_goal_std,failure_rate");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);
    CHECK(csv.find("seqbit,0,") != std::string::npos);
    CHECK(csv.find("dovs,0,") != std::string::npos);
}
