// haznav command line: run scenarios, reproduce the full success-rate sweep,
// export fused maps, and verify recorded runs replay bit-exactly.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "haznav/harness.hpp"
#include "haznav/map_io.hpp"
#include "haznav/vlm_client.hpp"

namespace fs = std::filesystem;
using namespace haznav;

#ifndef HAZNAV_DEFAULT_SCENARIO_DIR
#define HAZNAV_DEFAULT_SCENARIO_DIR "scenarios"
#endif

namespace {

constexpr int kExitConfigError = 2;

std::shared_ptr<HazardBackend> make_live_backend() {
    VlmEndpointConfig cfg;
    if (const char* host = std::getenv("HAZNAV_VLM_HOST")) cfg.host = host;
    if (const char* port = std::getenv("HAZNAV_VLM_PORT")) cfg.port = std::atoi(port);
    if (const char* path = std::getenv("HAZNAV_VLM_PATH")) cfg.path = path;
    if (const char* model = std::getenv("HAZNAV_VLM_HAZARD_MODEL")) cfg.hazard_model = model;
    if (const char* model = std::getenv("HAZNAV_VLM_EMOTION_MODEL")) cfg.emotion_model = model;
    if (const char* key = std::getenv("HAZNAV_VLM_API_KEY")) cfg.api_key = key;
    return std::make_shared<LiveVlmBackend>(cfg);
}

SweepConfig sweep_config_from_file(const std::string& path) {
    SweepConfig cfg;
    const toml::Value root = toml::parse_file(path);
    const toml::Value& sweep = root.at("sweep");
    cfg.scenario_dir = sweep.get_string("scenario_dir", HAZNAV_DEFAULT_SCENARIO_DIR);
    cfg.runs = static_cast<int>(sweep.get_int("runs", 10));
    cfg.base_seed = static_cast<std::uint64_t>(sweep.get_int("base_seed", 1000));
    cfg.out_dir = sweep.get_string("out_dir", "out");
    if (sweep.contains("scenarios")) {
        for (const auto& v : sweep.at("scenarios").array) cfg.scenarios.push_back(v.as_string());
    }
    if (sweep.contains("methods")) {
        for (const auto& v : sweep.at("methods").array) {
            const auto m = parse_method(v.as_string());
            if (!m) throw ConfigError("sweep.methods: unknown method '" + v.as_string() + "'");
            cfg.methods.push_back(*m);
        }
    }
    if (cfg.runs < 1) throw ConfigError("sweep.runs: must be >= 1");
    return cfg;
}

void print_run(const RunEntry& e) {
    std::cout << e.scenario << "/" << method_name(e.method) << " run " << e.run_index << " ("
              << (e.reverse ? "reverse" : "forward") << ", seed " << e.seed << "): "
              << (e.record.success ? "success" : "FAILURE") << " [" << e.record.outcome << "] "
              << "path " << format_double(e.record.path_length) << " m, " << e.record.ticks
              << " ticks\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"haznav: hazard-aware navigation scenarios and sweeps"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string scenario_dir = HAZNAV_DEFAULT_SCENARIO_DIR;
    app.add_option("--scenarios-dir", scenario_dir, "directory holding <scenario>.toml files");

    // run
    auto* cmd_run = app.add_subcommand("run", "run one scenario");
    std::string run_scenario_name;
    std::string run_method = "ours";
    int run_runs = 1;
    std::uint64_t run_seed = 1000;
    std::string run_out = "out";
    bool live_vlm = false;
    cmd_run->add_option("--scenario", run_scenario_name, "scenario name")->required();
    cmd_run->add_option("--method", run_method, "geometric|e2map|ours");
    cmd_run->add_option("--runs", run_runs, "number of seeded runs");
    cmd_run->add_option("--seed", run_seed, "base seed");
    cmd_run->add_option("--out", run_out, "output directory");
    cmd_run->add_flag("--live-vlm", live_vlm,
                      "use the HTTP reasoning endpoint configured via HAZNAV_VLM_* env vars");

    // sweep
    auto* cmd_sweep = app.add_subcommand("sweep", "run the full method x scenario grid");
    std::string sweep_config_path;
    int sweep_runs = -1;
    std::uint64_t sweep_seed = 0;
    bool sweep_seed_set = false;
    std::string sweep_out;
    cmd_sweep->add_option("--config", sweep_config_path, "sweep config TOML")->required();
    cmd_sweep->add_option("--runs", sweep_runs, "override runs per cell");
    cmd_sweep->add_option("--seed", sweep_seed, "override base seed")->each([&](const std::string&) {
        sweep_seed_set = true;
    });
    cmd_sweep->add_option("--out", sweep_out, "override output directory");

    // export-map
    auto* cmd_export = app.add_subcommand("export-map", "run once and export the fused map");
    std::string export_scenario, export_method = "ours", export_out = "out";
    std::uint64_t export_seed = 1000;
    bool export_reverse = false;
    cmd_export->add_option("--scenario", export_scenario, "scenario name")->required();
    cmd_export->add_option("--method", export_method, "geometric|e2map|ours");
    cmd_export->add_option("--seed", export_seed, "seed");
    cmd_export->add_option("--out", export_out, "output directory");
    cmd_export->add_flag("--reverse", export_reverse, "swap start and goal");

    // replay
    auto* cmd_replay = app.add_subcommand("replay", "re-run a sweep manifest and verify traces");
    std::string replay_manifest_path_arg;
    cmd_replay->add_option("--manifest", replay_manifest_path_arg, "manifest.json from a sweep")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_run) {
            const auto method = parse_method(run_method);
            if (!method) {
                std::cerr << "error: unknown method '" << run_method << "' (geometric|e2map|ours)\n";
                return kExitConfigError;
            }
            const auto def = load_scenario(scenario_path(scenario_dir, run_scenario_name).string());
            std::shared_ptr<HazardBackend> backend;
            if (live_vlm) backend = make_live_backend();

            fs::create_directories(run_out);
            EventMemory memory;
            int successes = 0;
            for (int i = 0; i < run_runs; ++i) {
                RunEntry entry;
                entry.scenario = run_scenario_name;
                entry.method = *method;
                entry.run_index = i;
                entry.seed = run_seed + static_cast<std::uint64_t>(i);
                entry.reverse = (i % 2) == 1;
                GaussianCostMap final_map;
                entry.record = run_single(def, *method, entry.seed, entry.reverse,
                                          *method == Method::e2map ? &memory : nullptr, &final_map,
                                          backend);
                print_run(entry);
                successes += entry.record.success ? 1 : 0;

                char run_name[16];
                std::snprintf(run_name, sizeof(run_name), "run_%02d", i);
                const fs::path dir = fs::path(run_out) / run_scenario_name / run_method / run_name;
                fs::create_directories(dir);
                write_trace_csv(entry.record, (dir / "trace.csv").string());
                write_pgm(final_map, (dir / "final_map.pgm").string());
                write_grid_spec_json(final_map.spec(), (dir / "final_map.json").string());
                const WorldSpec ws = entry.reverse ? reversed(def.world) : def.world;
                write_trajectory_ppm(entry.record, final_map, ws.robot.start.position(), ws.robot.goal,
                                     (dir / "trajectory.ppm").string());
            }
            std::cout << successes << "/" << run_runs << " successful\n";
            return successes == run_runs ? 0 : 1;
        }

        if (*cmd_sweep) {
            SweepConfig cfg = sweep_config_from_file(sweep_config_path);
            if (app.count("--scenarios-dir")) cfg.scenario_dir = scenario_dir;
            if (sweep_runs > 0) cfg.runs = sweep_runs;
            if (sweep_seed_set) cfg.base_seed = sweep_seed;
            if (!sweep_out.empty()) cfg.out_dir = sweep_out;
            if (cfg.scenarios.empty()) cfg.scenarios = list_scenarios(cfg.scenario_dir);
            if (cfg.methods.empty())
                cfg.methods = {Method::geometric, Method::e2map, Method::ours};

            const SweepReport report = run_sweep(cfg);
            for (const auto& e : report.entries) print_run(e);
            std::cout << "\n" << report_table_string(report);
            std::cout << "report: " << (cfg.out_dir / "report.csv").string() << "\n";
            std::cout << "manifest: " << (cfg.out_dir / "manifest.json").string() << "\n";
            return 0;
        }

        if (*cmd_export) {
            const auto method = parse_method(export_method);
            if (!method) {
                std::cerr << "error: unknown method '" << export_method << "' (geometric|e2map|ours)\n";
                return kExitConfigError;
            }
            const auto def = load_scenario(scenario_path(scenario_dir, export_scenario).string());
            GaussianCostMap final_map;
            const RunRecord record =
                run_single(def, *method, export_seed, export_reverse, nullptr, &final_map);
            fs::create_directories(export_out);
            const fs::path base = fs::path(export_out) / (export_scenario + "_" + export_method);
            write_pgm(final_map, base.string() + ".pgm");
            write_grid_spec_json(final_map.spec(), base.string() + ".json");
            write_cost_csv(final_map, base.string() + ".csv");
            std::cout << "outcome: " << record.outcome << "\n"
                      << "wrote " << base.string() << ".pgm/.json/.csv\n";
            return 0;
        }

        if (*cmd_replay) {
            const int mismatches = replay_manifest(replay_manifest_path_arg, scenario_dir, std::cout);
            if (mismatches == 0) {
                std::cout << "replay ok: all traces identical\n";
                return 0;
            }
            std::cerr << "replay FAILED: " << mismatches << " trace(s) differ\n";
            return 1;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const toml::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
