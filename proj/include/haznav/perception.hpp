#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "haznav/geometry.hpp"
#include "haznav/grid.hpp"
#include "haznav/hazard_pipeline.hpp"

namespace haznav {

/// Pinhole camera with a planar mount pose relative to the robot body.
/// Column bearing: pixel u maps to atan2(cx - (u + 0.5), fx), so bearings are
/// positive to the robot's left and the renderer and back-projection agree.
struct CameraModel {
    double fx{120.0};
    double fy{120.0};
    double cx{120.0};
    double cy{0.5};
    int width{240};
    int height{1};
    double max_range{6.0};
    Pose2D mount{};  // camera pose in the robot body frame

    void validate() const {
        if (!(fx > 0.0) || !(fy > 0.0)) throw std::invalid_argument("CameraModel: focal lengths must be > 0");
        if (cx < 0.0 || cx > width || cy < 0.0 || cy > height)
            throw std::invalid_argument("CameraModel: principal point outside image");
        if (!(max_range > 0.0)) throw std::invalid_argument("CameraModel: max_range must be > 0");
    }

    double bearing_of_column(int u) const { return std::atan2(cx - (u + 0.5), fx); }
};

/// Per-pixel range in meters; 0 marks invalid (no return).
struct DepthImage {
    int width{0};
    int height{0};
    std::vector<double> range;

    double at(int u, int v) const { return range[static_cast<std::size_t>(v) * width + u]; }
    double& at(int u, int v) { return range[static_cast<std::size_t>(v) * width + u]; }
    static bool valid(double r) { return r > 0.0; }
};

/// Binary pixel mask for one hazardous object, tagged with its label and score.
struct HazardMask {
    std::string label;
    int anxiety{1};
    std::vector<std::uint8_t> mask;  // width*height, row-major

    bool pixel(int u, int v, int width) const { return mask[static_cast<std::size_t>(v) * width + u] != 0; }
};

struct SegmentationMaskSet {
    int width{0};
    int height{0};
    std::vector<HazardMask> masks;
};

/// Oracle segmenter: grounds each hazardous-object label against the frame's
/// semantic channel by per-pixel label equality. Labels absent from the image
/// yield empty masks. Stands in for a zero-shot segmentation model behind the
/// same interface.
inline SegmentationMaskSet segment_hazards(const SceneImage& image,
                                           const std::map<std::string, int>& hazard_scores) {
    if (!image.has_semantic())
        throw std::invalid_argument("segment_hazards: image lacks the oracle semantic channel");
    SegmentationMaskSet out;
    out.width = image.width;
    out.height = image.height;
    const std::size_t n = image.semantic.size();
    for (const auto& [label, score] : hazard_scores) {
        HazardMask m;
        m.label = label;
        m.anxiety = std::clamp(score, 1, 3);
        m.mask.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (image.label_at(i) == label) m.mask[i] = 1;
        }
        out.masks.push_back(std::move(m));
    }
    return out;
}

struct AnxietyPoint {
    Vec2 world;
    int anxiety{1};
};

/// Back-projects masked pixels with valid depth through the pinhole model and
/// the robot pose into world-frame points, each tagged with its mask's score.
/// Depth is range along the ray. Invalid or out-of-range pixels are skipped.
inline std::vector<AnxietyPoint> masks_to_points(const SegmentationMaskSet& masks,
                                                 const DepthImage& depth,
                                                 const CameraModel& camera,
                                                 const Pose2D& robot_pose) {
    if (depth.width != masks.width || depth.height != masks.height)
        throw std::invalid_argument("masks_to_points: depth/mask dimension mismatch");
    const Pose2D camera_pose = robot_pose.compose(camera.mount);
    std::vector<AnxietyPoint> points;
    for (const auto& m : masks.masks) {
        for (int v = 0; v < masks.height; ++v) {
            for (int u = 0; u < masks.width; ++u) {
                if (!m.pixel(u, v, masks.width)) continue;
                const double r = depth.at(u, v);
                if (!DepthImage::valid(r) || r > camera.max_range) continue;
                const double b = camera.bearing_of_column(u);
                const Vec2 local{r * std::cos(b), r * std::sin(b)};
                points.push_back({camera_pose.transform(local), m.anxiety});
            }
        }
    }
    return points;
}

/// Projects world points onto the grid. Filtering: out-of-bounds points are
/// dropped, each cell keeps the max anxiety among its points, and cells
/// supported by fewer than n_min points are discarded.
inline std::vector<std::pair<CellIndex, std::uint8_t>> points_to_anxiety_cells(
    const std::vector<AnxietyPoint>& points, const GridSpec& spec, int n_min = 3) {
    spec.validate();
    std::map<std::pair<int, int>, std::pair<int, int>> cells;  // (row,col) -> (count, max anxiety)
    for (const auto& p : points) {
        const CellIndex c = spec.grid_of(p.world);
        if (!spec.contains(c)) continue;
        auto& entry = cells[{c.row, c.col}];
        entry.first += 1;
        entry.second = std::max(entry.second, std::clamp(p.anxiety, 1, 3));
    }
    std::vector<std::pair<CellIndex, std::uint8_t>> out;
    for (const auto& [rc, entry] : cells) {
        if (entry.first < n_min) continue;
        out.push_back({CellIndex{rc.first, rc.second}, static_cast<std::uint8_t>(entry.second)});
    }
    return out;
}

}  // namespace haznav
