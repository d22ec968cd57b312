#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "haznav/map_io.hpp"
#include "haznav/nav_stack.hpp"
#include "haznav/scenario_io.hpp"

namespace haznav {

struct SweepConfig {
    std::filesystem::path scenario_dir;
    std::vector<std::string> scenarios;
    std::vector<Method> methods;
    int runs{10};
    std::uint64_t base_seed{1000};
    std::filesystem::path out_dir{"out"};
    bool write_artifacts{true};
};

struct RunEntry {
    std::string scenario;
    Method method{Method::ours};
    int run_index{0};
    std::uint64_t seed{0};
    bool reverse{false};
    RunRecord record;
};

struct SweepCell {
    std::string scenario;
    Method method{Method::ours};
    int successes{0};
    int runs{0};
};

struct SweepReport {
    std::vector<RunEntry> entries;
    std::vector<SweepCell> cells;
    std::vector<std::string> artifacts;  // every file written, repo of record
};

inline std::vector<std::string> list_scenarios(const std::filesystem::path& dir) {
    std::vector<std::string> names;
    if (!std::filesystem::is_directory(dir)) return names;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".toml") names.push_back(entry.path().stem().string());
    }
    std::sort(names.begin(), names.end());
    return names;
}

inline std::filesystem::path scenario_path(const std::filesystem::path& dir, const std::string& name) {
    const auto path = dir / (name + ".toml");
    if (!std::filesystem::exists(path)) {
        std::string msg = "unknown scenario '" + name + "'; valid names:";
        for (const auto& n : list_scenarios(dir)) msg += " " + n;
        throw ConfigError(msg);
    }
    return path;
}

/// Runs one closed-loop episode. `final_map` (optional) receives the fused
/// map as of the last tick, for export and plotting.
inline RunRecord run_single(const ScenarioDef& def, Method method, std::uint64_t seed, bool reverse,
                            EventMemory* memory = nullptr, GaussianCostMap* final_map = nullptr,
                            std::shared_ptr<HazardBackend> backend = nullptr) {
    WorldSpec ws = reverse ? reversed(def.world) : def.world;
    World world(ws, def.script);
    if (!backend) backend = std::make_shared<MockHazardBackend>(def.stack.fixtures);
    NavStack stack(method, def.stack, std::move(backend), memory);
    return stack.run(world, seed, final_map);
}

/// Runs the N seeded episodes of one (scenario, method) cell. Runs alternate
/// forward/reverse; the e2map baseline carries its event memory across the
/// whole series.
inline std::vector<RunEntry> run_series(const ScenarioDef& def, const std::string& scenario_name,
                                        Method method, int runs, std::uint64_t base_seed,
                                        std::vector<GaussianCostMap>* final_maps = nullptr) {
    std::vector<RunEntry> out;
    EventMemory memory;
    for (int i = 0; i < runs; ++i) {
        RunEntry entry;
        entry.scenario = scenario_name;
        entry.method = method;
        entry.run_index = i;
        entry.seed = base_seed + static_cast<std::uint64_t>(i);
        entry.reverse = (i % 2) == 1;
        GaussianCostMap map;
        entry.record = run_single(def, method, entry.seed, entry.reverse,
                                  method == Method::e2map ? &memory : nullptr,
                                  final_maps ? &map : nullptr);
        if (final_maps) final_maps->push_back(std::move(map));
        out.push_back(std::move(entry));
    }
    return out;
}

// ---------------------------------------------------------------------------
// artifact writers
// ---------------------------------------------------------------------------

inline void write_trace_csv(const RunRecord& record, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
    out << "tick,time,x,y,heading,v_cmd,omega_cmd,collision,hazard_capture_tick,anxiety_cells,min_clearance\n";
    for (const auto& r : record.trace) {
        out << r.tick << ',' << format_double(r.time) << ',' << format_double(r.x) << ','
            << format_double(r.y) << ',' << format_double(r.heading) << ',' << format_double(r.v_cmd)
            << ',' << format_double(r.omega_cmd) << ',' << (r.collision ? 1 : 0) << ','
            << r.hazard_capture_tick << ',' << r.anxiety_cells << ','
            << format_double(r.min_clearance) << '\n';
    }
}

inline std::string trace_csv_string(const RunRecord& record) {
    std::ostringstream ss;
    ss << "tick,time,x,y,heading,v_cmd,omega_cmd,collision,hazard_capture_tick,anxiety_cells,min_clearance\n";
    for (const auto& r : record.trace) {
        ss << r.tick << ',' << format_double(r.time) << ',' << format_double(r.x) << ','
           << format_double(r.y) << ',' << format_double(r.heading) << ',' << format_double(r.v_cmd)
           << ',' << format_double(r.omega_cmd) << ',' << (r.collision ? 1 : 0) << ','
           << r.hazard_capture_tick << ',' << r.anxiety_cells << ','
           << format_double(r.min_clearance) << '\n';
    }
    return ss.str();
}

/// Trajectory over the fused map as a PPM image (robot path in red, start
/// green, goal blue; map cost as gray levels, dark = costly).
inline void write_trajectory_ppm(const RunRecord& record, const GaussianCostMap& map,
                                 const Vec2& start, const Vec2& goal, const std::string& path) {
    const GridSpec& spec = map.spec();
    const int w = spec.cols, h = spec.rows;
    std::vector<std::uint8_t> img(static_cast<std::size_t>(w) * h * 3);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const double v = std::clamp(map.at(r, c), 0.0, 1.0);
            const auto g = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - v)));
            // image row 0 at top = max y
            const std::size_t i = (static_cast<std::size_t>(h - 1 - r) * w + c) * 3;
            img[i] = img[i + 1] = img[i + 2] = g;
        }
    }
    auto paint = [&](const Vec2& p, std::uint8_t r8, std::uint8_t g8, std::uint8_t b8, int radius) {
        const CellIndex cell = spec.grid_of(p);
        for (int dr = -radius; dr <= radius; ++dr) {
            for (int dc = -radius; dc <= radius; ++dc) {
                const CellIndex q{cell.row + dr, cell.col + dc};
                if (!spec.contains(q) || dr * dr + dc * dc > radius * radius) continue;
                const std::size_t i = (static_cast<std::size_t>(h - 1 - q.row) * w + q.col) * 3;
                img[i] = r8;
                img[i + 1] = g8;
                img[i + 2] = b8;
            }
        }
    };
    for (const auto& row : record.trace) paint({row.x, row.y}, 220, 30, 30, 1);
    paint(start, 30, 180, 30, 3);
    paint(goal, 30, 60, 220, 3);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_trajectory_ppm: cannot open " + path);
    out << "P6\n" << w << " " << h << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
}

inline std::string report_csv_string(const SweepReport& report) {
    std::ostringstream ss;
    ss << "method,scenario,run,seed,direction,success,collisions,path_length_m,ticks,outcome\n";
    for (const auto& e : report.entries) {
        ss << method_name(e.method) << ',' << e.scenario << ',' << e.run_index << ',' << e.seed << ','
           << (e.reverse ? "reverse" : "forward") << ',' << (e.record.success ? 1 : 0) << ','
           << e.record.collisions << ',' << format_double(e.record.path_length) << ','
           << e.record.ticks << ',' << e.record.outcome << '\n';
    }
    return ss.str();
}

/// Success-rate grid, methods x scenarios.
inline std::string report_table_string(const SweepReport& report) {
    std::vector<std::string> scenarios;
    std::vector<Method> methods;
    for (const auto& cell : report.cells) {
        if (std::find(scenarios.begin(), scenarios.end(), cell.scenario) == scenarios.end())
            scenarios.push_back(cell.scenario);
        if (std::find(methods.begin(), methods.end(), cell.method) == methods.end())
            methods.push_back(cell.method);
    }
    auto lookup = [&](Method m, const std::string& s) -> std::string {
        for (const auto& cell : report.cells) {
            if (cell.method == m && cell.scenario == s)
                return std::to_string(cell.successes) + "/" + std::to_string(cell.runs);
        }
        return "-";
    };
    std::ostringstream ss;
    ss << "success rate (goal reached, zero collisions)\n";
    ss << std::left;
    ss.width(12);
    ss << "method";
    for (const auto& s : scenarios) {
        ss.width(16);
        ss << s;
    }
    ss << '\n';
    for (const auto& m : methods) {
        ss.width(12);
        ss << method_name(m);
        for (const auto& s : scenarios) {
            ss.width(16);
            ss << lookup(m, s);
        }
        ss << '\n';
    }
    return ss.str();
}

// ---------------------------------------------------------------------------
// sweep driver
// ---------------------------------------------------------------------------

inline SweepReport run_sweep(const SweepConfig& config) {
    namespace fs = std::filesystem;
    SweepReport report;

    std::map<std::string, ScenarioDef> defs;
    for (const auto& name : config.scenarios) {
        defs.emplace(name, load_scenario(scenario_path(config.scenario_dir, name).string()));
    }

    if (config.write_artifacts) fs::create_directories(config.out_dir);

    for (const auto& scenario : config.scenarios) {
        for (const Method method : config.methods) {
            std::vector<GaussianCostMap> final_maps;
            auto entries = run_series(defs.at(scenario), scenario, method, config.runs,
                                      config.base_seed, config.write_artifacts ? &final_maps : nullptr);
            SweepCell cell;
            cell.scenario = scenario;
            cell.method = method;
            cell.runs = static_cast<int>(entries.size());
            for (const auto& e : entries) cell.successes += e.record.success ? 1 : 0;
            report.cells.push_back(cell);

            if (config.write_artifacts) {
                for (std::size_t i = 0; i < entries.size(); ++i) {
                    const auto& e = entries[i];
                    char run_name[16];
                    std::snprintf(run_name, sizeof(run_name), "run_%02d", e.run_index);
                    const fs::path dir = config.out_dir / scenario / method_name(method) / run_name;
                    fs::create_directories(dir);

                    const ScenarioDef& def = defs.at(scenario);
                    const WorldSpec ws = e.reverse ? reversed(def.world) : def.world;

                    const auto trace = (dir / "trace.csv").string();
                    write_trace_csv(e.record, trace);
                    report.artifacts.push_back(trace);

                    const auto pgm = (dir / "final_map.pgm").string();
                    write_pgm(final_maps[i], pgm);
                    report.artifacts.push_back(pgm);

                    const auto meta = (dir / "final_map.json").string();
                    write_grid_spec_json(final_maps[i].spec(), meta);
                    report.artifacts.push_back(meta);

                    const auto ppm = (dir / "trajectory.ppm").string();
                    write_trajectory_ppm(e.record, final_maps[i], ws.robot.start.position(),
                                         ws.robot.goal, ppm);
                    report.artifacts.push_back(ppm);
                }
            }
            for (auto& e : entries) report.entries.push_back(std::move(e));
        }
    }

    if (config.write_artifacts) {
        const auto report_csv = (config.out_dir / "report.csv").string();
        {
            std::ofstream out(report_csv);
            out << report_csv_string(report);
        }
        report.artifacts.push_back(report_csv);

        const auto table = (config.out_dir / "report.txt").string();
        {
            std::ofstream out(table);
            out << report_table_string(report);
        }
        report.artifacts.push_back(table);

        nlohmann::json manifest;
        manifest["scenario_dir"] = config.scenario_dir.string();
        manifest["runs"] = config.runs;
        manifest["base_seed"] = config.base_seed;
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& e : report.entries) {
            runs.push_back({{"scenario", e.scenario},
                            {"method", method_name(e.method)},
                            {"run", e.run_index},
                            {"seed", e.seed},
                            {"reverse", e.reverse},
                            {"trace", (config.out_dir / e.scenario / method_name(e.method) /
                                       ("run_" + std::string(e.run_index < 10 ? "0" : "") +
                                        std::to_string(e.run_index)) / "trace.csv")
                                          .string()}});
        }
        manifest["runs"] = runs;
        const auto manifest_path = (config.out_dir / "manifest.json").string();
        nlohmann::json artifact_list = nlohmann::json::array();
        for (const auto& a : report.artifacts) artifact_list.push_back(a);
        artifact_list.push_back(manifest_path);  // the manifest lists itself
        manifest["artifacts"] = artifact_list;
        {
            std::ofstream out(manifest_path);
            out << manifest.dump(2) << "\n";
        }
        report.artifacts.push_back(manifest_path);
    }

    return report;
}

/// Re-executes every run recorded in a sweep manifest and verifies the stored
/// traces are reproduced byte-for-byte. Returns the number of mismatches.
inline int replay_manifest(const std::string& manifest_path, const std::filesystem::path& scenario_dir,
                           std::ostream& log) {
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("replay: cannot open " + manifest_path);
    nlohmann::json manifest;
    in >> manifest;

    int mismatches = 0;
    std::map<std::string, ScenarioDef> defs;
    std::map<std::string, EventMemory> memories;  // per (scenario, method=e2map) series

    for (const auto& run : manifest.at("runs")) {
        const std::string scenario = run.at("scenario").get<std::string>();
        const std::string method_str = run.at("method").get<std::string>();
        const auto method = parse_method(method_str);
        if (!method) throw std::runtime_error("replay: bad method " + method_str);
        if (!defs.count(scenario))
            defs.emplace(scenario, load_scenario(scenario_path(scenario_dir, scenario).string()));

        EventMemory* memory = nullptr;
        if (*method == Method::e2map) memory = &memories[scenario];

        const RunRecord record = run_single(defs.at(scenario), *method,
                                            run.at("seed").get<std::uint64_t>(),
                                            run.at("reverse").get<bool>(), memory);
        const std::string expected = trace_csv_string(record);
        std::ifstream trace_file(run.at("trace").get<std::string>(), std::ios::binary);
        std::stringstream stored;
        stored << trace_file.rdbuf();
        const bool ok = trace_file && stored.str() == expected;
        log << (ok ? "  ok   " : "  DIFF ") << scenario << "/" << method_str << " run "
            << run.at("run").get<int>() << "\n";
        if (!ok) ++mismatches;
    }
    return mismatches;
}

}  // namespace haznav
