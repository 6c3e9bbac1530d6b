// Copyright (C) 2026 occtrack contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "occtrack/core_types.hpp"
#include "occtrack/error.hpp"

namespace occtrack {

/// Down-sampling factor between input image and occlusion map.
inline constexpr int kOcclusionStride = 4;

/// Default visibility threshold for embedding-consistency samples.
inline constexpr double kDefaultValidVisibility = 0.5;

/**
 * Occlusion degree s = 1 - v for a visibility v in [0,1].
 *
 * The map stores occlusion degree while detections carry a visibility-like
 * score; the conversion is its own inverse, so this is the only place the
 * flip happens (visibility == occlusion_degree(degree)).
 */
inline double occlusion_degree(double visibility) {
    if (!(visibility >= 0.0 && visibility <= 1.0)) {
        throw InputError("visibility must lie in [0,1], got " + std::to_string(visibility));
    }
    return 1.0 - visibility;
}

/// Ground-truth box with visibility, as read from annotation files.
struct AnnotatedBox {
    BoundingBox box;
    double visibility = 1.0;
    int identity = 1;
};

struct GridCell {
    int x = 0;
    int y = 0;

    friend bool operator==(const GridCell&, const GridCell&) = default;
};

/// H x W grid of occlusion degrees, row-major.
class OcclusionMap {
public:
    OcclusionMap(int height, int width) : height_(height), width_(width) {
        if (height <= 0 || width <= 0) {
            throw InputError("occlusion map dimensions must be positive");
        }
        values_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), 0.0);
    }

    /// Map sized for an input image: floor(image / stride) per axis.
    static OcclusionMap for_image(int image_width, int image_height) {
        return OcclusionMap(image_height / kOcclusionStride, image_width / kOcclusionStride);
    }

    int height() const { return height_; }
    int width() const { return width_; }

    double at(int x, int y) const { return values_[index(x, y)]; }

    void set(int x, int y, double value) {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw InputError("occlusion map values must lie in [0,1]");
        }
        values_[index(x, y)] = value;
    }

    std::span<const double> values() const { return values_; }

    std::size_t positive_count() const {
        return static_cast<std::size_t>(
            std::count_if(values_.begin(), values_.end(), [](double v) { return v > 0.0; }));
    }

    bool same_shape(const OcclusionMap& other) const {
        return height_ == other.height_ && width_ == other.width_;
    }

    friend bool operator==(const OcclusionMap&, const OcclusionMap&) = default;

private:
    std::size_t index(int x, int y) const {
        if (x < 0 || x >= width_ || y < 0 || y >= height_) {
            throw InputError("occlusion map cell out of range");
        }
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int height_;
    int width_;
    std::vector<double> values_;
};

/// Box center mapped onto the stride-4 grid, clamped to the border cells.
inline GridCell grid_position(const BoundingBox& b, int height, int width) {
    if (height <= 0 || width <= 0) {
        throw InputError("grid dimensions must be positive");
    }
    const Point2 c = center(b);
    const auto cell = [](double coord, int extent) {
        const double f = std::floor(coord / kOcclusionStride);
        return static_cast<int>(std::clamp(f, 0.0, static_cast<double>(extent - 1)));
    };
    return {cell(c.x, width), cell(c.y, height)};
}

/**
 * Ground-truth occlusion map: impulses at each annotation's center cell,
 * carrying that annotation's occlusion degree. Colliding centers keep the
 * maximum, so the result is independent of annotation order. Fully visible
 * annotations (s = 0) leave their cell at zero.
 */
inline OcclusionMap build_gt_map(std::span<const AnnotatedBox> annotations, int height, int width) {
    OcclusionMap map(height, width);
    for (const auto& a : annotations) {
        const double s = occlusion_degree(a.visibility);
        const GridCell cell = grid_position(a.box, height, width);
        map.set(cell.x, cell.y, std::max(map.at(cell.x, cell.y), s));
    }
    return map;
}

/**
 * Mean L1 error over cells where the ground truth is positive.
 * positive_count must equal the number of such cells; zero positives give 0.
 */
inline double occlusion_loss(const OcclusionMap& gt, const OcclusionMap& pred, std::size_t positive_count) {
    if (!gt.same_shape(pred)) {
        throw InputError("occlusion maps differ in shape");
    }
    if (positive_count != gt.positive_count()) {
        throw InputError("positive count does not match the ground-truth map");
    }
    if (positive_count == 0) {
        return 0.0;
    }
    const auto g = gt.values();
    const auto p = pred.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] > 0.0) {
            sum += std::abs(g[i] - p[i]);
        }
    }
    return sum / static_cast<double>(positive_count);
}

inline double occlusion_loss(const OcclusionMap& gt, const OcclusionMap& pred) {
    return occlusion_loss(gt, pred, gt.positive_count());
}

/// Annotations visible enough to serve as embedding-consistency samples (v >= threshold).
inline std::vector<AnnotatedBox> select_valid_samples(std::span<const AnnotatedBox> annotations,
                                                      double threshold = kDefaultValidVisibility) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw InputError("visibility threshold must lie in [0,1]");
    }
    std::vector<AnnotatedBox> out;
    std::copy_if(annotations.begin(), annotations.end(), std::back_inserter(out),
                 [threshold](const AnnotatedBox& a) { return a.visibility >= threshold; });
    return out;
}

}  // namespace occtrack
