// Copyright (C) 2026 occtrack contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "occtrack/core_types.hpp"
#include "occtrack/error.hpp"

namespace occtrack {

using Vector4 = Eigen::Matrix<double, 4, 1>;
using Vector8 = Eigen::Matrix<double, 8, 1>;
using Matrix4 = Eigen::Matrix<double, 4, 4>;
using Matrix8 = Eigen::Matrix<double, 8, 8>;
using Matrix48 = Eigen::Matrix<double, 4, 8>;

/// 0.95 quantile of the chi-square distribution with 4 degrees of freedom.
inline constexpr double kChi2Gate4 = 9.4877;

/// Smallest aspect ratio / height kept in a state mean.
inline constexpr double kMinShape = 1e-6;

/**
 * Box measurement (cx, cy, a = w/h, h).
 */
struct Measurement {
    Vector4 value = Vector4::Zero();

    static Measurement from_values(double cx, double cy, double aspect, double height) {
        if (!(aspect > 0.0) || !(height > 0.0) || !std::isfinite(cx) || !std::isfinite(cy) ||
            !std::isfinite(aspect) || !std::isfinite(height)) {
            throw InputError("measurement needs finite values with positive aspect and height");
        }
        Measurement m;
        m.value << cx, cy, aspect, height;
        return m;
    }

    static Measurement from_box(const BoundingBox& b) {
        if (!b.valid() || b.height() <= 0.0 || b.width() <= 0.0) {
            throw InputError("cannot build a measurement from a box with zero extent");
        }
        const Point2 c = center(b);
        return from_values(c.x, c.y, b.width() / b.height(), b.height());
    }
};

/// Mean (cx, cy, a, h, vcx, vcy, va, vh) and its covariance.
struct MotionState {
    Vector8 mean = Vector8::Zero();
    Matrix8 covariance = Matrix8::Identity();

    BoundingBox box() const {
        const double h = mean(3);
        const double w = mean(2) * h;
        return {mean(0) - w / 2.0, mean(1) - h / 2.0, mean(0) + w / 2.0, mean(1) + h / 2.0};
    }
};

/// Noise scales relative to the box height.
struct MotionParams {
    double std_weight_position = 1.0 / 20.0;
    double std_weight_velocity = 1.0 / 160.0;
};

/// Squared Mahalanobis distance d^T S^-1 d.
inline double squared_mahalanobis(const Vector4& innovation, const Matrix4& innovation_cov) {
    const Eigen::LLT<Matrix4> llt(innovation_cov);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("innovation covariance is not positive definite");
    }
    const Vector4 z = llt.matrixL().solve(innovation);
    return std::max(0.0, z.squaredNorm());
}

/// Inclusive chi-square gate on a squared distance.
inline bool gate(double squared_distance, double threshold = kChi2Gate4) {
    return squared_distance <= threshold;
}

/**
 * Constant-velocity Kalman filter over (cx, cy, a, h) with one-frame steps.
 * Stateless apart from its noise parameters; every operation maps a state to
 * a new state.
 */
class KalmanFilter {
public:
    explicit KalmanFilter(MotionParams params = {}) : params_(params) {
        transition_.setIdentity();
        transition_.topRightCorner<4, 4>().setIdentity();
        projection_.setZero();
        projection_.leftCols<4>().setIdentity();
    }

    const MotionParams& params() const { return params_; }

    MotionState initiate(const Measurement& m) const {
        const double h = m.value(3);
        if (!(h > 0.0) || !(m.value(2) > 0.0)) {
            throw InputError("measurement needs positive aspect and height");
        }
        MotionState s;
        s.mean.head<4>() = m.value;
        s.mean.tail<4>().setZero();
        const double p = params_.std_weight_position * h;
        const double v = params_.std_weight_velocity * h;
        Vector8 std;
        std << 2 * p, 2 * p, 1e-2, 2 * p, 10 * v, 10 * v, 1e-5, 10 * v;
        s.covariance = std.array().square().matrix().asDiagonal();
        return s;
    }

    MotionState predict(const MotionState& s) const {
        const double h = s.mean(3);
        const double p = params_.std_weight_position * h;
        const double v = params_.std_weight_velocity * h;
        Vector8 std;
        std << p, p, 1e-2, p, v, v, 1e-5, v;
        const Matrix8 q = std.array().square().matrix().asDiagonal();

        MotionState out;
        out.mean = transition_ * s.mean;
        out.covariance = transition_ * s.covariance * transition_.transpose() + q;
        symmetrize(out.covariance);
        clamp_shape(out.mean);
        return out;
    }

    /// Measurement-space mean and covariance (with measurement noise).
    std::pair<Vector4, Matrix4> project(const MotionState& s) const {
        Matrix4 cov = projection_ * s.covariance * projection_.transpose() + measurement_noise(s.mean(3));
        return {projection_ * s.mean, 0.5 * (cov + cov.transpose())};
    }

    /// Joseph-form correction, which keeps the posterior symmetric PSD.
    MotionState update(const MotionState& s, const Measurement& m) const {
        const auto [projected_mean, projected_cov] = project(s);
        const Eigen::LLT<Matrix4> llt(projected_cov);
        if (llt.info() != Eigen::Success) {
            throw NumericalError("innovation covariance is singular");
        }
        const Eigen::Matrix<double, 8, 4> pht = s.covariance * projection_.transpose();
        const Eigen::Matrix<double, 8, 4> gain = llt.solve(pht.transpose()).transpose();
        const Vector4 innovation = m.value - projected_mean;

        const Matrix4 r = measurement_noise(s.mean(3));
        const Matrix8 ikh = Matrix8::Identity() - gain * projection_;

        MotionState out;
        out.mean = s.mean + gain * innovation;
        out.covariance = ikh * s.covariance * ikh.transpose() + gain * r * gain.transpose();
        symmetrize(out.covariance);
        clamp_shape(out.mean);
        return out;
    }

    /// Squared Mahalanobis distance between the projected state and a measurement.
    double mahalanobis(const MotionState& s, const Measurement& m) const {
        const auto [projected_mean, projected_cov] = project(s);
        return squared_mahalanobis(m.value - projected_mean, projected_cov);
    }

private:
    Matrix4 measurement_noise(double height) const {
        const double p = params_.std_weight_position * height;
        Vector4 std;
        std << p, p, 1e-1, p;
        return std.array().square().matrix().asDiagonal();
    }

    static void symmetrize(Matrix8& m) { m = 0.5 * (m + m.transpose()).eval(); }

    static void clamp_shape(Vector8& mean) {
        mean(2) = std::max(mean(2), kMinShape);
        mean(3) = std::max(mean(3), kMinShape);
    }

    MotionParams params_;
    Matrix8 transition_;
    Matrix48 projection_;
};

}  // namespace occtrack
