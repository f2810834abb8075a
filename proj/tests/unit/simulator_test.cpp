#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "rowexit/headland.hpp"
#include "rowexit/matcher.hpp"
#include "rowexit/simulator.hpp"
#include "test_support.hpp"

namespace rowexit::sim {
namespace {

using Vec = std::array<double, 3>;

// Ray through pixel (u, v) for a camera pitched down by `pitch`, x forward, z up.
Vec pixel_ray(const CameraPose& pose, const CameraIntrinsics& intr, double u, double v) {
    const double f = intr.focal_y();
    const double du = u - intr.cx();
    const double dv = v - intr.cy();
    const double c = std::cos(pose.pitch), s = std::sin(pose.pitch);
    return {f * c - dv * s, -du, -f * s - dv * c};
}

double norm(const Vec& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

// Camera-to-ground distance along the ray, metres.
double ground_depth(const CameraPose& pose, const CameraIntrinsics& intr, double u, double v) {
    const Vec r = pixel_ray(pose, intr, u, v);
    return pose.height / -r[2] * norm(r);
}

Vec ground_point(const CameraPose& pose, const CameraIntrinsics& intr, double u, double v) {
    const Vec r = pixel_ray(pose, intr, u, v);
    const double t = pose.height / -r[2];
    return {pose.position + t * r[0], t * r[1], 0.0};
}

bool is_ground(std::uint8_t s) {
    return s == static_cast<std::uint8_t>(SurfaceKind::RowGround) ||
           s == static_cast<std::uint8_t>(SurfaceKind::HeadlandGround);
}

TEST(Simulator_Depth, BottomCentreMatchesGeometry) {
    const CameraIntrinsics intr;
    CameraPose pose;
    pose.pitch = deg_to_rad(20);
    pose.position = 1.0;
    const auto frame = render_frame(WorldConfig{}, pose, intr);
    const double want_mm = 1000 * ground_depth(pose, intr, 320, 479);
    EXPECT_NEAR(want_mm, 663.0, 1.0);
    EXPECT_NEAR(frame.depth.at(320, 479), want_mm, 1.0);
    // Top row looks above the hedge.
    EXPECT_EQ(frame.depth.at(320, 0), 0);
}

TEST(Simulator_Depth, MatchesGeometryAcrossHeadlandGround) {
    const CameraIntrinsics intr;
    const WorldConfig world;
    CameraPose pose;
    pose.position = world.row_length + 0.5;
    const auto frame = render_labeled(world, pose, intr);
    for (int y = 0; y < intr.height; y += 37) {
        for (int x = 0; x < intr.width; x += 53) {
            ASSERT_EQ(frame.surface.at(x, y), static_cast<std::uint8_t>(SurfaceKind::HeadlandGround));
            EXPECT_NEAR(frame.depth.at(x, y), 1000 * ground_depth(pose, intr, x, y), 1.0);
        }
    }
}

TEST(Simulator_Depth, SpanAgreesWithGroundTruth) {
    // Flat headland filling the view: the span must reproduce the ground distance
    // between the footprints of the bottom and top rows along the optical plane.
    const CameraIntrinsics intr;
    WorldConfig world;
    world.headland_depth = 20.0;
    for (double pitch_deg : {40.0, 50.0, 60.0}) {
        CameraPose pose;
        pose.pitch = deg_to_rad(pitch_deg);
        pose.position = world.row_length + 0.3;
        const auto frame = render_frame(world, pose, intr);
        const auto span = estimate_span(frame.depth, intr);
        const Vec a = ground_point(pose, intr, intr.cx(), intr.height - 1);
        const Vec b = ground_point(pose, intr, intr.cx(), span.far_row);
        const double truth = norm({a[0] - b[0], a[1] - b[1], a[2] - b[2]});
        EXPECT_NEAR(span.d_fov, truth, 0.02 * truth) << "pitch " << pitch_deg;
    }
}

TEST(Simulator_Depth, ColumnsNonDecreasingUpwardOverGround) {
    const CameraIntrinsics intr;
    const WorldConfig world;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> pitch(20, 60), pos(4.0, 7.5), height(0.3, 0.8);
    for (int i = 0; i < 4; ++i) {
        CameraPose pose{height(rng), deg_to_rad(pitch(rng)), pos(rng)};
        const auto f = render_labeled(world, pose, intr);
        std::size_t ground = 0;
        for (int x = 0; x < intr.width; ++x) {
            int prev = -1;
            for (int y = intr.height - 1; y >= 0; --y) {
                if (!is_ground(f.surface.at(x, y))) continue;
                ++ground;
                const int d = f.depth.at(x, y);
                if (d == 0) continue;
                ASSERT_GE(d, prev) << "x=" << x << " y=" << y;
                prev = d;
            }
        }
        EXPECT_GT(ground, 1000u);
    }
}

TEST(Simulator_Render, Deterministic) {
    const CameraIntrinsics intr;
    WorldConfig world;
    CameraPose pose;
    pose.position = 5.5;
    const auto a = render_frame(world, pose, intr);
    const auto b = render_frame(world, pose, intr);
    EXPECT_EQ(a.rgb, b.rgb);
    EXPECT_EQ(a.depth, b.depth);
    world.texture_seed += 1;
    const auto c = render_frame(world, pose, intr);
    EXPECT_NE(a.rgb, c.rgb);
    EXPECT_EQ(a.depth, c.depth);
}

TEST(Simulator_Render, LabeledMatchesPlain) {
    const CameraIntrinsics intr;
    const WorldConfig world;
    CameraPose pose;
    pose.pitch = deg_to_rad(25);
    pose.position = 4.0;
    const auto plain = render_frame(world, pose, intr);
    const auto labeled = render_labeled(world, pose, intr);
    EXPECT_EQ(plain.rgb, labeled.rgb);
    EXPECT_EQ(plain.depth, labeled.depth);
    bool plant = false, hedge = false;
    for (auto s : labeled.surface.pixels()) {
        plant |= s == static_cast<std::uint8_t>(SurfaceKind::Plant);
        hedge |= s == static_cast<std::uint8_t>(SurfaceKind::Boundary);
    }
    EXPECT_TRUE(plant);
    EXPECT_TRUE(hedge);
}

TEST(Simulator_Texture, VerdantRichSoilPoor) {
    const CameraIntrinsics intr;
    WorldConfig world;
    CameraPose pose;
    pose.position = world.row_length + 0.5;
    const auto verdant = detect_and_describe(rgb_to_gray(render_frame(world, pose, intr).rgb)).size();
    world.headland_texture = HeadlandTexture::Soil;
    const auto soil = detect_and_describe(rgb_to_gray(render_frame(world, pose, intr).rgb)).size();
    EXPECT_GT(verdant, 2 * soil);
    EXPECT_GE(verdant, 30u);
}

TEST(Simulator_Geometry, GroundDistanceAndFrontOffset) {
    const CameraIntrinsics intr;
    CameraPose pose;
    pose.height = 1.0;
    pose.pitch = deg_to_rad(45);
    EXPECT_NEAR(ground_distance_at_row(pose, intr, intr.cy()), 1.0, 1e-12);
    EXPECT_NEAR(front_offset(pose, intr), 1.0 / std::tan(deg_to_rad(45) + intr.row_angle(0)), 1e-12);
    pose.pitch = deg_to_rad(10);
    EXPECT_TRUE(std::isinf(ground_distance_at_row(pose, intr, 0)));
    pose.pitch = deg_to_rad(89);
    EXPECT_EQ(front_offset(pose, intr), 0.0);
}

TEST(Simulator_Config, Validation) {
    WorldConfig w;
    w.supersample = 0;
    EXPECT_THROW(w.validate(), Error);
    w = {};
    w.soil_contrast = 0.7;
    EXPECT_THROW(w.validate(), Error);
    CameraPose p;
    p.pitch = 0;
    EXPECT_THROW(p.validate(), Error);
    EXPECT_EQ(parse_headland_texture("soil"), HeadlandTexture::Soil);
    EXPECT_EQ(parse_headland_texture("verdant"), HeadlandTexture::Verdant);
    EXPECT_FALSE(parse_headland_texture("gravel").has_value());
}

}  // namespace
}  // namespace rowexit::sim
