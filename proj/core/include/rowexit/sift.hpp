#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "rowexit/image.hpp"
#include "rowexit/scale_space.hpp"

namespace rowexit {

struct Keypoint {
    double x = 0;            // image column, sub-pixel
    double y = 0;            // image row, sub-pixel
    double sigma = 0;        // absolute scale in image pixels
    int octave = 0;
    double orientation = 0;  // radians in [0, 2pi), image axes (y down)
    double response = 0;     // |DoG| at the refined extremum
};

inline constexpr int kDescriptorSize = 128;

/// Unit-norm 4x4x8 gradient-orientation histogram; entries in [0,1].
struct Descriptor {
    std::array<float, kDescriptorSize> values{};

    friend bool operator==(const Descriptor&, const Descriptor&) = default;
};

struct Feature {
    Keypoint keypoint;
    Descriptor descriptor;
};

/// Receives every (x, y) octave-image pixel a descriptor computation reads.
using SampleObserver = std::function<void(int x, int y)>;

/// Builds the descriptor of `kp` from its Gaussian level. Returns nullopt when the
/// rotated sampling window leaves the octave image or the window has no gradient.
std::optional<Descriptor> try_compute_descriptor(const ScaleSpace& space, const Keypoint& kp,
                                                 const SampleObserver& observer = {});

/// Throwing form of try_compute_descriptor (WindowOutOfBounds).
Descriptor compute_descriptor(const ScaleSpace& space, const Keypoint& kp);

/// DoG keypoints with orientations and descriptors, sorted by (y, x, sigma, orientation).
std::vector<Feature> detect_and_describe(const GrayImage& img, const FeatureParams& params = {});
std::vector<Feature> detect_and_describe(const ScaleSpace& space);

std::vector<Descriptor> descriptors_of(const std::vector<Feature>& features);

/// Debug dump: header `x,y,sigma,orientation,response`, one row per keypoint.
void write_keypoints_csv(std::ostream& out, const std::vector<Feature>& features);

}  // namespace rowexit
