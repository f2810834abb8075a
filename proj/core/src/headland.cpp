#include "rowexit/headland.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace rowexit {

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

double CameraIntrinsics::focal_y() const { return (height / 2.0) / std::tan(vertical_fov / 2.0); }

double CameraIntrinsics::row_angle(double y) const { return std::atan((cy() - y) / focal_y()); }

void CameraIntrinsics::validate() const {
    if (!(vertical_fov > 0 && vertical_fov < std::numbers::pi)) {
        fail(ErrorCode::InvalidArgument, "vertical field of view must lie in (0, pi)");
    }
    if (width <= 0 || height <= 0) fail(ErrorCode::InvalidArgument, "camera dimensions must be positive");
}

void RobotGeometry::validate() const {
    if (!(length > 0)) fail(ErrorCode::InvalidArgument, "robot length must be > 0");
    if (!(scale > 0)) fail(ErrorCode::InvalidArgument, "robot scale factor must be > 0");
}

double row_median_depth(const DepthImage& depth, int row, std::uint16_t max_range_mm) {
    if (row < 0 || row >= depth.height()) {
        fail(ErrorCode::InvalidArgument, "row " + std::to_string(row) + " outside depth image");
    }
    std::vector<std::uint16_t> valid;
    valid.reserve(depth.width());
    for (std::uint16_t v : depth.row(row)) {
        if (v != 0 && v <= max_range_mm) valid.push_back(v);
    }
    if (valid.empty() || 2 * valid.size() < static_cast<std::size_t>(depth.width())) {
        fail(ErrorCode::InsufficientDepth, "row " + std::to_string(row) + " has " + std::to_string(valid.size()) +
                                               " valid of " + std::to_string(depth.width()));
    }
    const std::size_t mid = valid.size() / 2;
    std::nth_element(valid.begin(), valid.begin() + mid, valid.end());
    double median_mm = valid[mid];
    if (valid.size() % 2 == 0) {
        const auto lower = *std::max_element(valid.begin(), valid.begin() + mid);
        median_mm = (median_mm + lower) / 2.0;
    }
    return median_mm / 1000.0;
}

double estimate_dfov(double d1, double d2, double alpha) {
    const double diff = d1 - d2;
    const double s = std::sin(alpha / 2.0);
    return std::sqrt(diff * diff + 4.0 * d1 * d2 * s * s);
}

HeadlandSpan estimate_span(const DepthImage& depth, const CameraIntrinsics& intr, std::uint16_t max_range_mm) {
    intr.validate();
    if (depth.width() != intr.width || depth.height() != intr.height) {
        fail(ErrorCode::DimensionMismatch, "depth frame does not match camera intrinsics");
    }
    HeadlandSpan span;
    span.near_row = depth.height() - 1;
    span.d1 = row_median_depth(depth, span.near_row, max_range_mm);

    int far = -1;
    for (int y = 0; y < span.near_row; ++y) {
        std::size_t valid = 0;
        for (std::uint16_t v : depth.row(y)) valid += (v != 0 && v <= max_range_mm);
        if (2 * valid >= static_cast<std::size_t>(depth.width()) && valid > 0) {
            far = y;
            break;
        }
    }
    if (far < 0) {
        fail(ErrorCode::InsufficientDepth, "no usable far row above the bottom row");
    }
    span.far_row = far;
    span.d2 = row_median_depth(depth, far, max_range_mm);
    span.alpha = far == 0 ? intr.vertical_fov : intr.row_angle(far) - intr.row_angle(span.near_row);
    span.d_fov = estimate_dfov(span.d1, span.d2, span.alpha);
    return span;
}

CropMask stage2_mask(const HeadlandSpan& span, const RobotGeometry& robot, int height) {
    robot.validate();
    if (height <= 0) fail(ErrorCode::InvalidArgument, "image height must be positive");
    if (!(span.d_fov > 0) || !std::isfinite(span.d_fov)) {
        fail(ErrorCode::InvalidArgument, "headland span must be positive and finite");
    }
    if (span.d_fov < robot.length) {
        fail(ErrorCode::HeadlandTooShort, "visible headland " + std::to_string(span.d_fov) +
                                              " m is shorter than the robot (" + std::to_string(robot.length) +
                                              " m)");
    }
    const double fraction = std::min(1.0, robot.length / span.d_fov);
    int start = static_cast<int>(std::floor((1.0 - fraction) * height));
    start = std::clamp(start, 0, height - 1);
    return {start, height};
}

}  // namespace rowexit
