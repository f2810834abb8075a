#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "rowexit/headland.hpp"
#include "rowexit/image.hpp"

namespace rowexit::sim {

enum class HeadlandTexture { Soil, Verdant };

std::string_view to_string(HeadlandTexture t);
std::optional<HeadlandTexture> parse_headland_texture(std::string_view s);

/// Flat field: a crop row of length `row_length` along +x starting at x = 0, a headland
/// strip of `headland_depth` beyond it, then a boundary hedge. The robot drives along
/// y = 0 between two plant rows at y = +-row_half_width.
struct WorldConfig {
    double row_length = 6.0;
    double plant_spacing = 0.15;
    double plant_height = 0.2;
    double plant_width = 0.12;
    double row_half_width = 0.22;
    double headland_depth = 3.0;
    double boundary_height = 1.5;
    HeadlandTexture headland_texture = HeadlandTexture::Verdant;
    std::uint64_t texture_seed = 7;
    double soil_contrast = 0.15;
    double verdant_contrast = 0.6;
    double row_ground_contrast = 0.6;
    int supersample = 1;  // colour samples per pixel along each axis; depth uses the pixel centre

    double texture_contrast() const {
        return headland_texture == HeadlandTexture::Soil ? soil_contrast : verdant_contrast;
    }
    void validate() const;
};

struct CameraPose {
    double height = 0.5;                 // metres above ground
    double pitch = deg_to_rad(60.0);     // radians below horizontal
    double position = 0.0;               // camera x along the track, metres

    void validate() const;
};

enum class SurfaceKind : std::uint8_t { Sky, RowGround, HeadlandGround, Boundary, Plant };

struct RenderedFrame {
    RgbImage rgb;
    DepthImage depth;
};

struct LabeledFrame {
    RgbImage rgb;
    DepthImage depth;
    Image<std::uint8_t> surface;  // SurfaceKind per pixel
};

/// Ray-casts one RGB-D frame. Depth is the Euclidean camera-to-hit distance in mm,
/// 0 for no hit or beyond `max_range_mm`. Fully deterministic in its inputs.
RenderedFrame render_frame(const WorldConfig& world, const CameraPose& pose, const CameraIntrinsics& intr,
                           std::uint16_t max_range_mm = kDefaultMaxRangeMm);
LabeledFrame render_labeled(const WorldConfig& world, const CameraPose& pose, const CameraIntrinsics& intr,
                            std::uint16_t max_range_mm = kDefaultMaxRangeMm);

/// Ground distance ahead of the camera seen by image row y (+inf if the ray misses).
double ground_distance_at_row(const CameraPose& pose, const CameraIntrinsics& intr, double y);

/// Distance from the camera to the robot's front: the near edge of the camera's ground
/// footprint, or 0 when the bottom ray points at or behind the vertical.
double front_offset(const CameraPose& pose, const CameraIntrinsics& intr);

}  // namespace rowexit::sim
