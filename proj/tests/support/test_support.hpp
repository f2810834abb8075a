#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "rowexit/error.hpp"
#include "rowexit/image.hpp"
#include "rowexit/matcher.hpp"
#include "rowexit/run_config.hpp"
#include "rowexit/scale_space.hpp"
#include "rowexit/simulator.hpp"

namespace rowexit::testing {

/// Stage settings of a default run (0.8 m robot).
inline StageConfig run_stage() { return RunConfig{}.stage; }

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("rowexit_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Blurred white noise with boosted contrast: dense DoG extrema, no two neighbourhoods alike.
inline GrayImage blob_texture(int width, int height, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    GrayImage img(width, height);
    for (auto& v : img.pixels()) v = u(rng);
    img = gaussian_blur(img, 2.0);
    for (auto& v : img.pixels()) v = std::clamp(0.5f + 8.0f * (v - 0.5f), 0.0f, 1.0f);
    return img;
}

/// Window of `src` starting at (x0, y0).
inline GrayImage window(const GrayImage& src, int x0, int y0, int width, int height) {
    GrayImage out(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) out.at(x, y) = src.at(x0 + x, y0 + y);
    }
    return out;
}

/// Luminance of a rendered view looking at verdant headland from above its near edge.
inline GrayImage verdant_view(std::uint64_t seed, double position_offset = 0.5) {
    sim::WorldConfig world;
    world.texture_seed = seed;
    sim::CameraPose pose;
    pose.position = world.row_length + position_offset;
    return rgb_to_gray(sim::render_frame(world, pose, CameraIntrinsics{}).rgb);
}

inline std::vector<Descriptor> random_descriptors(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<int> level(0, 7);
    std::vector<Descriptor> out(n);
    for (auto& d : out) {
        // Coarse levels make exact distance ties common.
        for (auto& v : d.values) v = static_cast<float>(level(rng)) / 7.0f;
    }
    return out;
}

/// Non-negative descriptors with unit norm.
inline std::vector<Descriptor> unit_descriptors(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    std::vector<Descriptor> out(n);
    for (auto& d : out) {
        double norm = 0;
        for (auto& v : d.values) {
            v = u(rng);
            norm += static_cast<double>(v) * v;
        }
        for (auto& v : d.values) v = static_cast<float>(v / std::sqrt(norm));
    }
    return out;
}

/// Train set for `queries`: unit distractors, plus for roughly half the queries a
/// noisy or exact copy, and occasionally the same copy twice (an exact distance tie).
inline std::vector<Descriptor> planted_train(std::mt19937_64& rng, const std::vector<Descriptor>& queries,
                                             std::size_t distractors) {
    auto out = unit_descriptors(rng, distractors);
    std::uniform_int_distribution<int> kind(0, 5);
    std::normal_distribution<float> noise(0.0f, 0.01f);
    for (const auto& q : queries) {
        const int k = kind(rng);
        if (k >= 3) continue;
        Descriptor c = q;
        if (k == 0) {
            for (auto& v : c.values) v = std::max(0.0f, v + noise(rng));
        }
        out.push_back(c);
        if (k == 2) out.push_back(c);
    }
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

/// Fractional ranks, ties averaged.
inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double mean_rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = mean_rank;
        i = j + 1;
    }
    return r;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

/// Straight O(n*m) two-nearest-neighbour search plus ratio test, written without
/// reference to the library's matcher. Returns (query, train, kept) triples.
struct OracleMatch {
    std::size_t query, train;
    bool kept;
};

inline std::vector<OracleMatch> oracle_match(const std::vector<Descriptor>& q, const std::vector<Descriptor>& t,
                                             double ratio) {
    std::vector<OracleMatch> out;
    if (t.size() < 2) return out;
    for (std::size_t i = 0; i < q.size(); ++i) {
        std::vector<std::pair<double, std::size_t>> all;
        for (std::size_t j = 0; j < t.size(); ++j) {
            double s = 0;
            for (int k = 0; k < kDescriptorSize; ++k) {
                const double d = static_cast<double>(q[i].values[k]) - static_cast<double>(t[j].values[k]);
                s += d * d;
            }
            all.emplace_back(s, j);
        }
        std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        const double d1 = std::sqrt(all[0].first);
        const double d2 = std::sqrt(all[1].first);
        out.push_back({i, all[0].second, d1 == 0.0 || d1 < ratio * d2});
    }
    return out;
}

}  // namespace rowexit::testing
