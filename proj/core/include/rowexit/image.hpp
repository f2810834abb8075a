#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rowexit/error.hpp"

namespace rowexit {

/// Row-major pixel buffer with `Channels` interleaved samples per pixel.
template <typename T, int Channels = 1>
class Image {
public:
    using value_type = T;
    static constexpr int channels = Channels;

    Image() = default;
    Image(int width, int height, T fill = T{})
        : width_(width), height_(height),
          data_(checked_size(width, height), fill) {}
    Image(int width, int height, std::vector<T> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (data_.size() != checked_size(width, height)) {
            fail(ErrorCode::InvalidArgument, "pixel buffer size does not match dimensions");
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return data_.empty(); }

    T& at(int x, int y, int c = 0) noexcept {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * Channels + c];
    }
    const T& at(int x, int y, int c = 0) const noexcept {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * Channels + c];
    }

    std::span<T> row(int y) noexcept {
        return {data_.data() + static_cast<std::size_t>(y) * width_ * Channels,
                static_cast<std::size_t>(width_) * Channels};
    }
    std::span<const T> row(int y) const noexcept {
        return {data_.data() + static_cast<std::size_t>(y) * width_ * Channels,
                static_cast<std::size_t>(width_) * Channels};
    }

    std::span<T> pixels() noexcept { return data_; }
    std::span<const T> pixels() const noexcept { return data_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    static std::size_t checked_size(int width, int height) {
        if (width < 0 || height < 0) {
            fail(ErrorCode::InvalidArgument, "negative image dimension");
        }
        return static_cast<std::size_t>(width) * height * Channels;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

/// Luminance in [0,1]. Scale-space stages reuse the container for signed DoG values.
using GrayImage = Image<float>;
using RgbImage = Image<std::uint8_t, 3>;
/// Millimetres; 0 marks an invalid sample.
using DepthImage = Image<std::uint16_t>;

inline constexpr std::uint16_t kDefaultMaxRangeMm = 10000;

/// Half-open row span [row_start, row_end) applied to full image width.
struct CropMask {
    int row_start = 0;
    int row_end = 0;

    int rows() const noexcept { return row_end - row_start; }
    bool valid_for(int height) const noexcept {
        return row_start >= 0 && row_start < row_end && row_end <= height;
    }
    static CropMask full(int height) noexcept { return {0, height}; }

    friend bool operator==(const CropMask&, const CropMask&) = default;
};

/// BT.601 luma, scaled to [0,1].
GrayImage rgb_to_gray(const RgbImage& img);

template <typename T, int C>
Image<T, C> crop_rows(const Image<T, C>& img, CropMask mask) {
    if (!mask.valid_for(img.height())) {
        fail(ErrorCode::InvalidMask,
             "row span [" + std::to_string(mask.row_start) + ", " + std::to_string(mask.row_end) +
                 ") invalid for height " + std::to_string(img.height()));
    }
    Image<T, C> out(img.width(), mask.rows());
    for (int y = 0; y < mask.rows(); ++y) {
        auto src = img.row(mask.row_start + y);
        std::copy(src.begin(), src.end(), out.row(y).begin());
    }
    return out;
}

}  // namespace rowexit
