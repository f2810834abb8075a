#include "rowexit/image.hpp"

namespace rowexit {

GrayImage rgb_to_gray(const RgbImage& img) {
    GrayImage out(img.width(), img.height());
    auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        const double r = src[3 * i];
        const double g = src[3 * i + 1];
        const double b = src[3 * i + 2];
        const double luma = (0.299 * r + 0.587 * g + 0.114 * b) / 255.0;
        // 0.299 + 0.587 + 0.114 rounds to exactly 1 in double, but keep the clamp
        // so white can never exceed 1 after the float narrowing.
        dst[i] = static_cast<float>(luma > 1.0 ? 1.0 : luma);
    }
    return out;
}

}  // namespace rowexit
