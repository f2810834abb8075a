#pragma once

#include <cstdint>

#include "rowexit/image.hpp"

namespace rowexit {

inline constexpr double kDefaultVerticalFovDeg = 58.0;

double deg_to_rad(double deg);

/// Square-pixel pinhole camera described by its vertical field of view.
struct CameraIntrinsics {
    double vertical_fov = deg_to_rad(kDefaultVerticalFovDeg);  // radians
    int width = 640;
    int height = 480;

    double focal_y() const;  // (height/2) / tan(fov/2), pixels
    double cx() const { return (width - 1) / 2.0; }
    double cy() const { return (height - 1) / 2.0; }
    /// Elevation of the ray through image row y relative to the optical axis,
    /// positive above it: atan((cy - y) / focal_y).
    double row_angle(double y) const;

    void validate() const;
};

/// Near-row depth d1, far-row depth d2 and the ground distance between them.
struct HeadlandSpan {
    double d1 = 0;     // metres
    double d2 = 0;     // metres
    double d_fov = 0;  // metres
    double alpha = 0;  // angle actually used, radians
    int near_row = 0;
    int far_row = 0;

    friend bool operator==(const HeadlandSpan&, const HeadlandSpan&) = default;
};

struct RobotGeometry {
    double length = 1.0;  // metres
    double scale = 1.0;   // unitless multiplier m
    double target_distance() const { return scale * length; }

    void validate() const;
};

/// Median of the valid samples (0 < v <= max_range_mm) of one depth row, in metres.
/// Throws InsufficientDepth when fewer than half the row is valid.
double row_median_depth(const DepthImage& depth, int row, std::uint16_t max_range_mm = kDefaultMaxRangeMm);

/// Law of cosines, in the cancellation-free form (d1-d2)^2 + 4 d1 d2 sin^2(alpha/2).
double estimate_dfov(double d1, double d2, double alpha);

/// d1 from the bottom row, d2 from the top row (or the highest row that is at least
/// half valid, with the angle narrowed to the rows actually used).
HeadlandSpan estimate_span(const DepthImage& depth, const CameraIntrinsics& intr,
                           std::uint16_t max_range_mm = kDefaultMaxRangeMm);

/// Bottom-anchored mask covering the fraction length/d_fov of the image height.
/// Throws HeadlandTooShort when d_fov < robot length.
CropMask stage2_mask(const HeadlandSpan& span, const RobotGeometry& robot, int height);

}  // namespace rowexit
