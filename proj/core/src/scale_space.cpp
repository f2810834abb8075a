#include "rowexit/scale_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rowexit {
namespace {

// Blur already present in a camera image, per the usual SIFT assumption.
constexpr double kAssumedInputBlur = 0.5;

std::vector<float> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += k[i + radius];
    }
    std::vector<float> out(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) out[i] = static_cast<float>(k[i] / sum);
    return out;
}

GrayImage downsample_half(const GrayImage& img) {
    GrayImage out(std::max(1, img.width() / 2), std::max(1, img.height() / 2));
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) out.at(x, y) = img.at(2 * x, 2 * y);
    }
    return out;
}

GrayImage upsample_double(const GrayImage& img) {
    const int w = img.width() * 2;
    const int h = img.height() * 2;
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        const float sy = std::min(y * 0.5f, static_cast<float>(img.height() - 1));
        const int y0 = static_cast<int>(sy);
        const int y1 = std::min(y0 + 1, img.height() - 1);
        const float fy = sy - y0;
        for (int x = 0; x < w; ++x) {
            const float sx = std::min(x * 0.5f, static_cast<float>(img.width() - 1));
            const int x0 = static_cast<int>(sx);
            const int x1 = std::min(x0 + 1, img.width() - 1);
            const float fx = sx - x0;
            const float top = img.at(x0, y0) * (1 - fx) + img.at(x1, y0) * fx;
            const float bot = img.at(x0, y1) * (1 - fx) + img.at(x1, y1) * fx;
            out.at(x, y) = top * (1 - fy) + bot * fy;
        }
    }
    return out;
}

}  // namespace

void FeatureParams::validate() const {
    if (scales_per_octave < 1) fail(ErrorCode::InvalidArgument, "scales_per_octave must be >= 1");
    if (!(base_sigma > 0)) fail(ErrorCode::InvalidArgument, "base_sigma must be > 0");
    if (!(contrast_threshold > 0)) fail(ErrorCode::InvalidArgument, "contrast_threshold must be > 0");
    if (!(edge_ratio_threshold > 0)) fail(ErrorCode::InvalidArgument, "edge_ratio_threshold must be > 0");
    if (max_octaves < 0) fail(ErrorCode::InvalidArgument, "max_octaves must be >= 0");
}

double Octave::step() const { return std::ldexp(1.0, index); }

double ScaleSpace::sigma(int octave, double level) const {
    return params.base_sigma * std::pow(2.0, octave + level / params.scales_per_octave);
}

int octave_count(int width, int height, const FeatureParams& params) {
    const int side = std::min(width, height);
    int n = static_cast<int>(std::floor(std::log2(static_cast<double>(side)))) - 2;
    if (params.upsample) ++n;
    if (params.max_octaves > 0) n = std::min(n, params.max_octaves);
    return std::max(n, 1);
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    const std::vector<float> k = gaussian_kernel(sigma);
    const int r = static_cast<int>(k.size() / 2);
    const int w = img.width();
    const int h = img.height();

    // Horizontal pass through a padded row buffer.
    GrayImage tmp(w, h);
    std::vector<float> padded(w + 2 * r);
    for (int y = 0; y < h; ++y) {
        auto src = img.row(y);
        std::fill(padded.begin(), padded.begin() + r, src.front());
        std::copy(src.begin(), src.end(), padded.begin() + r);
        std::fill(padded.begin() + r + w, padded.end(), src.back());
        auto dst = tmp.row(y);
        for (int x = 0; x < w; ++x) {
            const float* p = padded.data() + x;
            float acc = 0.f;
            for (std::size_t i = 0; i < k.size(); ++i) acc += k[i] * p[i];
            dst[x] = acc;
        }
    }

    // Vertical pass, accumulating whole rows so the inner loop is contiguous.
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        auto dst = out.row(y);
        std::fill(dst.begin(), dst.end(), 0.f);
        for (int i = -r; i <= r; ++i) {
            const int sy = std::clamp(y + i, 0, h - 1);
            const float kv = k[i + r];
            auto src = tmp.row(sy);
            for (int x = 0; x < w; ++x) dst[x] += kv * src[x];
        }
    }
    return out;
}

ScaleSpace build_scale_space(const GrayImage& img, const FeatureParams& params) {
    params.validate();
    if (img.width() < kMinFeatureImageSide || img.height() < kMinFeatureImageSide) {
        fail(ErrorCode::ImageTooSmall, std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                                           " is below the 16x16 minimum");
    }
    ScaleSpace space;
    space.params = params;

    const int levels = params.scales_per_octave + 3;
    const int n_oct = octave_count(img.width(), img.height(), params);
    const int first = params.upsample ? -1 : 0;

    // Octave-relative sigma of each level and the incremental blur between levels.
    std::vector<double> rel(levels);
    std::vector<double> incr(levels, 0.0);
    for (int s = 0; s < levels; ++s) {
        rel[s] = params.base_sigma * std::pow(2.0, static_cast<double>(s) / params.scales_per_octave);
        if (s > 0) incr[s] = std::sqrt(rel[s] * rel[s] - rel[s - 1] * rel[s - 1]);
    }

    GrayImage base = params.upsample ? upsample_double(img) : img;
    const double present = params.upsample ? 2.0 * kAssumedInputBlur : kAssumedInputBlur;
    const double initial = std::sqrt(std::max(params.base_sigma * params.base_sigma - present * present, 0.01));
    base = gaussian_blur(base, initial);

    space.octaves.reserve(n_oct);
    for (int o = 0; o < n_oct; ++o) {
        Octave oct;
        oct.index = first + o;
        oct.gaussians.reserve(levels);
        if (o == 0) {
            oct.gaussians.push_back(std::move(base));
        } else {
            oct.gaussians.push_back(downsample_half(space.octaves.back().gaussians[params.scales_per_octave]));
        }
        for (int s = 1; s < levels; ++s) {
            oct.gaussians.push_back(gaussian_blur(oct.gaussians.back(), incr[s]));
        }
        oct.dogs.reserve(levels - 1);
        for (int s = 0; s + 1 < levels; ++s) {
            const GrayImage& a = oct.gaussians[s];
            const GrayImage& b = oct.gaussians[s + 1];
            GrayImage d(a.width(), a.height());
            auto pa = a.pixels();
            auto pb = b.pixels();
            auto pd = d.pixels();
            for (std::size_t i = 0; i < pd.size(); ++i) pd[i] = pb[i] - pa[i];
            oct.dogs.push_back(std::move(d));
        }
        space.octaves.push_back(std::move(oct));
    }
    return space;
}

}  // namespace rowexit
