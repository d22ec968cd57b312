#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "haznav/harness.hpp"

using namespace haznav;
namespace fs = std::filesystem;

namespace {

const char* kMiniScenario = R"(
[world]
name = "mini"
dt = 0.1
max_ticks = 400

[world.robot]
start = [0.6, 1.0, 0.0]
goal = [3.4, 1.0]
radius = 0.2

[world.camera]
width = 120
fx = 60.0
cx = 60.0
max_range = 5.0

[world.grid]
rows = 50
cols = 90
resolution = 0.05
origin = [-0.2, -0.2]

[[entity]]
name = "south"
label = "wall"
polygon = [[-0.1, -0.1], [4.1, -0.1], [4.1, 0.1], [-0.1, 0.1]]

[[entity]]
name = "north"
label = "wall"
polygon = [[-0.1, 1.9], [4.1, 1.9], [4.1, 2.1], [-0.1, 2.1]]

[[entity]]
name = "west"
label = "wall"
polygon = [[-0.1, -0.1], [0.1, -0.1], [0.1, 2.1], [-0.1, 2.1]]

[[entity]]
name = "east"
label = "wall"
polygon = [[3.9, -0.1], [4.1, -0.1], [4.1, 2.1], [3.9, 2.1]]

[stack]
n_min_points = 1

[stack.mppi]
samples = 96
horizon = 20
lambda_goal = 2.0
)";

fs::path make_mini_scenario_dir() {
    const auto dir = fs::temp_directory_path() / "haznav_harness_test" / "scenarios";
    fs::create_directories(dir);
    std::ofstream out(dir / "mini.toml");
    out << kMiniScenario;
    return dir;
}

}  // namespace

TEST_CASE("shipped scenario files load and validate", "[harness]") {
    const fs::path dir = HAZNAV_SCENARIO_DIR;
    const auto names = list_scenarios(dir);
    REQUIRE(std::find(names.begin(), names.end(), "danger_sign") != names.end());
    REQUIRE(std::find(names.begin(), names.end(), "dynamic_door") != names.end());
    REQUIRE(std::find(names.begin(), names.end(), "seated_chair") != names.end());
    for (const auto& name : names) {
        const auto def = load_scenario(scenario_path(dir, name).string());
        REQUIRE(def.world.grid.rows > 0);
        REQUIRE_FALSE(def.world.entities.empty());
        REQUIRE_FALSE(def.stack.fixtures.empty());
    }
}

TEST_CASE("unknown scenario names list the valid ones", "[harness]") {
    const fs::path dir = HAZNAV_SCENARIO_DIR;
    try {
        scenario_path(dir, "no_such_scenario");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        REQUIRE(msg.find("no_such_scenario") != std::string::npos);
        REQUIRE(msg.find("danger_sign") != std::string::npos);
        REQUIRE(msg.find("dynamic_door") != std::string::npos);
        REQUIRE(msg.find("seated_chair") != std::string::npos);
    }
}

TEST_CASE("config validation reports field-level errors", "[harness]") {
    REQUIRE_THROWS_AS(scenario_from_toml(toml::parse("x = 1\n")), toml::ParseError);
    // missing robot start
    const char* bad = R"(
[world]
name = "bad"
[world.robot]
goal = [1.0, 1.0]
[world.camera]
[world.grid]
rows = 10
cols = 10
)";
    try {
        scenario_from_toml(toml::parse(bad));
        FAIL("expected error");
    } catch (const std::exception& e) {
        REQUIRE(std::string(e.what()).find("start") != std::string::npos);
    }

    const char* bad_event = R"(
[world]
name = "bad"
[world.robot]
start = [0.0, 0.0, 0.0]
goal = [1.0, 1.0]
[world.camera]
[world.grid]
rows = 10
cols = 10
[[entity]]
name = "e"
label = "wall"
polygon = [[0,0],[1,0],[1,1]]
[[event]]
entity = "e"
trigger_time = 1.0
effect = "fly"
)";
    try {
        scenario_from_toml(toml::parse(bad_event));
        FAIL("expected error");
    } catch (const ConfigError& e) {
        REQUIRE(std::string(e.what()).find("effect") != std::string::npos);
    }
}

TEST_CASE("sweep produces deterministic reports, artifacts and a manifest", "[harness]") {
    const auto scenario_dir = make_mini_scenario_dir();
    const auto out_base = fs::temp_directory_path() / "haznav_harness_test";

    SweepConfig cfg;
    cfg.scenario_dir = scenario_dir;
    cfg.scenarios = {"mini"};
    cfg.methods = {Method::geometric, Method::ours};
    cfg.runs = 2;
    cfg.base_seed = 5;
    cfg.out_dir = out_base / "out_a";
    const auto report_a = run_sweep(cfg);

    cfg.out_dir = out_base / "out_b";
    const auto report_b = run_sweep(cfg);

    // byte-identical CSV reports
    const std::string csv_a = report_csv_string(report_a);
    const std::string csv_b = report_csv_string(report_b);
    REQUIRE(csv_a == csv_b);
    std::ifstream fa(out_base / "out_a" / "report.csv"), fb(out_base / "out_b" / "report.csv");
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    REQUIRE(sa.str() == sb.str());
    REQUIRE(sa.str() == csv_a);

    // the empty corridor is a success for every method
    for (const auto& cell : report_a.cells) {
        REQUIRE(cell.runs == 2);
        REQUIRE(cell.successes == 2);
    }

    // every artifact exists and is listed in the manifest
    nlohmann::json manifest;
    std::ifstream min(out_base / "out_a" / "manifest.json");
    min >> manifest;
    REQUIRE(manifest.contains("artifacts"));
    std::vector<std::string> listed;
    for (const auto& a : manifest["artifacts"]) listed.push_back(a.get<std::string>());
    for (const auto& artifact : report_a.artifacts) {
        REQUIRE(fs::exists(artifact));
        REQUIRE(std::find(listed.begin(), listed.end(), artifact) != listed.end());
    }
    // trace, map, metadata and plot per run, plus report/table/manifest
    REQUIRE(report_a.artifacts.size() == 2 * 2 * 4 + 3);

    // replay re-executes and verifies traces byte-for-byte
    std::ostringstream log;
    const int mismatches =
        replay_manifest((out_base / "out_a" / "manifest.json").string(), scenario_dir, log);
    REQUIRE(mismatches == 0);
}

TEST_CASE("report table summarizes successes per cell", "[harness]") {
    SweepReport report;
    report.cells.push_back({"danger_sign", Method::geometric, 10, 10});
    report.cells.push_back({"danger_sign", Method::ours, 9, 10});
    const std::string table = report_table_string(report);
    REQUIRE(table.find("geometric") != std::string::npos);
    REQUIRE(table.find("10/10") != std::string::npos);
    REQUIRE(table.find("9/10") != std::string::npos);
    REQUIRE(table.find("danger_sign") != std::string::npos);
}
