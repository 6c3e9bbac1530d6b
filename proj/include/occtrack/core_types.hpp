// Copyright (C) 2026 occtrack contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "occtrack/error.hpp"

namespace occtrack {

/// Appearance embedding. Dimension is fixed per sequence (128 by default).
using Embedding = Eigen::VectorXd;

inline constexpr int kDefaultEmbeddingDim = 128;

/**
 * Axis-aligned box in image coordinates (top-left origin), stored as corners.
 * Width/height and center are derived views.
 */
struct BoundingBox {
    double left = 0.0;
    double top = 0.0;
    double right = 0.0;
    double bottom = 0.0;

    static BoundingBox from_tlwh(double left, double top, double width, double height) {
        return {left, top, left + width, top + height};
    }

    double width() const { return right - left; }
    double height() const { return bottom - top; }
    double area() const { return width() * height(); }

    bool valid() const {
        return std::isfinite(left) && std::isfinite(top) && std::isfinite(right) &&
               std::isfinite(bottom) && right >= left && bottom >= top;
    }

    BoundingBox translated(double dx, double dy) const {
        return {left + dx, top + dy, right + dx, bottom + dy};
    }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 center(const BoundingBox& b) {
    return {(b.left + b.right) / 2.0, (b.top + b.bottom) / 2.0};
}

/// Intersection over union. Two degenerate boxes (zero union) give 0.
inline double iou(const BoundingBox& a, const BoundingBox& b) {
    const double iw = std::min(a.right, b.right) - std::max(a.left, b.left);
    const double ih = std::min(a.bottom, b.bottom) - std::max(a.top, b.top);
    if (iw <= 0.0 || ih <= 0.0) {
        return 0.0;
    }
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) {
        return 0.0;
    }
    return std::clamp(inter / uni, 0.0, 1.0);
}

/**
 * One per-frame observation.
 *
 * occlusion_score is the visibility-like response at the detection center:
 * 1 means unoccluded, 0 fully occluded. An empty embedding marks a detection
 * without appearance evidence (degraded mode, motion-only association).
 */
struct Detection {
    int frame = 1;
    BoundingBox box;
    double confidence = 1.0;
    Embedding embedding;
    double occlusion_score = 1.0;
};

struct FrameObservations {
    int frame = 1;
    std::vector<Detection> detections;
};

}  // namespace occtrack
