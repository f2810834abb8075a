#pragma once

#include <vector>

#include "rowexit/image.hpp"

namespace rowexit {

struct FeatureParams {
    int scales_per_octave = 3;
    double base_sigma = 1.6;
    /// Minimum |DoG| at the refined extremum, in [0,1] intensity units.
    double contrast_threshold = 0.03;
    /// Principal-curvature ratio r; extrema with tr^2/det >= (r+1)^2/r are rejected.
    double edge_ratio_threshold = 10.0;
    /// 0 selects the size-derived count.
    int max_octaves = 0;
    /// Double the input before building the pyramid (adds octave -1).
    bool upsample = false;

    void validate() const;
};

struct Octave {
    int index = 0;  // -1 when the input was upsampled
    std::vector<GrayImage> gaussians;  // scales_per_octave + 3 levels
    std::vector<GrayImage> dogs;       // gaussians.size() - 1 levels

    int width() const { return gaussians.front().width(); }
    int height() const { return gaussians.front().height(); }
    /// Image-space pixels per octave pixel.
    double step() const;
};

struct ScaleSpace {
    FeatureParams params;
    std::vector<Octave> octaves;

    /// Absolute blur of level `level` in octave `octave` (image-space pixels):
    /// base_sigma * 2^(octave + level / scales_per_octave).
    double sigma(int octave, double level) const;
};

/// Minimum accepted side length for feature extraction.
inline constexpr int kMinFeatureImageSide = 16;

/// Octave count for a WxH input: min(max_octaves, floor(log2(min(W,H))) - 2), plus one
/// when upsampling.
int octave_count(int width, int height, const FeatureParams& params);

/// Separable Gaussian blur, kernel radius ceil(3 sigma), replicated borders.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

ScaleSpace build_scale_space(const GrayImage& img, const FeatureParams& params = {});

}  // namespace rowexit
