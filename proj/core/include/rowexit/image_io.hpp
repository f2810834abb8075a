#pragma once

#include <filesystem>
#include <utility>

#include "rowexit/image.hpp"

namespace rowexit {

/// 8-bit RGB PNG. Gray and palette files are expanded; alpha is dropped.
RgbImage load_rgb_png(const std::filesystem::path& path);
/// 16-bit single-channel PNG holding raw millimetres.
DepthImage load_depth_png(const std::filesystem::path& path);

/// Loads a synchronized colour/depth frame. Throws DimensionMismatch when the
/// two files disagree in size, which indicates a corrupt recording.
std::pair<RgbImage, DepthImage> load_rgb_depth_pair(const std::filesystem::path& rgb_path,
                                                    const std::filesystem::path& depth_path);

/// Any 8/16-bit PNG (gray or colour) or binary PGM (P5), as luminance in [0,1].
GrayImage load_gray(const std::filesystem::path& path);

void save_rgb_png(const std::filesystem::path& path, const RgbImage& img);
void save_depth_png(const std::filesystem::path& path, const DepthImage& img);
/// Quantizes to 8 bits.
void save_gray_png(const std::filesystem::path& path, const GrayImage& img);
/// 8-bit binary PGM.
void save_pgm(const std::filesystem::path& path, const GrayImage& img);

}  // namespace rowexit
