#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "haznav/cost_map.hpp"
#include "haznav/dstar_lite.hpp"
#include "haznav/perception.hpp"

namespace haznav {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

/// Writes a cost map as binary PGM (P5, 8-bit), cost quantized by x255.
/// Row 0 is the first raster row.
inline void write_pgm(const GaussianCostMap& map, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
    out << "P5\n" << map.cols() << " " << map.rows() << "\n255\n";
    for (int r = 0; r < map.rows(); ++r) {
        for (int c = 0; c < map.cols(); ++c) {
            const double v = std::clamp(map.at(r, c), 0.0, 1.0);
            const auto q = static_cast<unsigned char>(std::lround(v * 255.0));
            out.put(static_cast<char>(q));
        }
    }
    if (!out) throw std::runtime_error("write_pgm: write failed for " + path);
}

/// Sidecar metadata carrying the GridSpec for an exported raster.
inline void write_grid_spec_json(const GridSpec& spec, const std::string& path) {
    nlohmann::json j;
    j["rows"] = spec.rows;
    j["cols"] = spec.cols;
    j["resolution"] = spec.resolution;
    j["origin"] = {spec.origin.x, spec.origin.y};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_grid_spec_json: cannot open " + path);
    out << j.dump(2) << "\n";
}

inline GridSpec read_grid_spec_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_grid_spec_json: cannot open " + path);
    nlohmann::json j;
    in >> j;
    GridSpec spec;
    spec.rows = j.at("rows").get<int>();
    spec.cols = j.at("cols").get<int>();
    spec.resolution = j.at("resolution").get<double>();
    spec.origin = {j.at("origin")[0].get<double>(), j.at("origin")[1].get<double>()};
    spec.validate();
    return spec;
}

/// Planned path as CSV: cell list plus the cost of each edge taken.
inline void write_plan_csv(const PlanResult& plan, const GaussianCostMap& map, double weight,
                           double block_threshold, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_plan_csv: cannot open " + path);
    out << "row,col,edge_cost\n";
    for (std::size_t i = 0; i < plan.path.size(); ++i) {
        const double edge = i == 0 ? 0.0
                                   : edge_cost(plan.path[i - 1], plan.path[i], map, weight,
                                               block_threshold);
        out << plan.path[i].row << ',' << plan.path[i].col << ',' << format_double(edge) << '\n';
    }
}

/// Hazard point cloud as CSV (world coordinates plus anxiety). Debug-oriented.
inline void write_points_csv(const std::vector<AnxietyPoint>& points, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_points_csv: cannot open " + path);
    out << "x,y,anxiety\n";
    for (const auto& p : points) {
        out << format_double(p.world.x) << ',' << format_double(p.world.y) << ',' << p.anxiety
            << '\n';
    }
}

/// Raw float cells as CSV, one map row per line. Debug-oriented.
inline void write_cost_csv(const GaussianCostMap& map, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_cost_csv: cannot open " + path);
    for (int r = 0; r < map.rows(); ++r) {
        for (int c = 0; c < map.cols(); ++c) {
            if (c) out << ',';
            out << format_double(map.at(r, c));
        }
        out << '\n';
    }
}

}  // namespace haznav
