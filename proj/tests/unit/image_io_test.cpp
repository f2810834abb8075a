#include <gtest/gtest.h>

#include <fstream>

#include "rowexit/image_io.hpp"
#include "error_code.hpp"
#include "test_support.hpp"

namespace rowexit {
namespace {

TEST(ImageIo_Png, RgbRoundTrip) {
    const auto dir = testing::scratch_dir("io_rgb");
    RgbImage img(7, 5);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 7; ++x)
            for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<std::uint8_t>(x * 30 + y * 7 + c);
    save_rgb_png(dir / "a.png", img);
    EXPECT_EQ(load_rgb_png(dir / "a.png"), img);
}

TEST(ImageIo_Png, DepthRoundTripKeepsSixteenBits) {
    const auto dir = testing::scratch_dir("io_depth");
    DepthImage img(4, 3);
    img.at(0, 0) = 0;
    img.at(1, 0) = 1;
    img.at(2, 1) = 65535;
    img.at(3, 2) = 1234;
    save_depth_png(dir / "d.png", img);
    EXPECT_EQ(load_depth_png(dir / "d.png"), img);
}

TEST(ImageIo_Png, MissingFile) {
    EXPECT_EQ(testing::code_of([] { (void)load_rgb_png("/nonexistent/x.png"); }), ErrorCode::MissingFile);
    EXPECT_EQ(testing::code_of([] { (void)load_depth_png("/nonexistent/x.png"); }), ErrorCode::MissingFile);
}

TEST(ImageIo_Png, GarbageIsDecodeError) {
    const auto dir = testing::scratch_dir("io_garbage");
    std::ofstream(dir / "bad.png") << "definitely not a png";
    EXPECT_EQ(testing::code_of([&] { (void)load_rgb_png(dir / "bad.png"); }), ErrorCode::DecodeError);
}

TEST(ImageIo_Png, EightBitDepthIsRejected) {
    const auto dir = testing::scratch_dir("io_depth8");
    save_gray_png(dir / "g.png", GrayImage(4, 4, 0.5f));
    EXPECT_EQ(testing::code_of([&] { (void)load_depth_png(dir / "g.png"); }), ErrorCode::DecodeError);
}

TEST(ImageIo_Png, PairSizeMismatch) {
    const auto dir = testing::scratch_dir("io_pair");
    save_rgb_png(dir / "rgb.png", RgbImage(8, 6));
    save_depth_png(dir / "depth.png", DepthImage(8, 5));
    EXPECT_EQ(testing::code_of([&] { (void)load_rgb_depth_pair(dir / "rgb.png", dir / "depth.png"); }),
              ErrorCode::DimensionMismatch);
    save_depth_png(dir / "depth.png", DepthImage(8, 6, 500));
    const auto [rgb, depth] = load_rgb_depth_pair(dir / "rgb.png", dir / "depth.png");
    EXPECT_EQ(depth.at(7, 5), 500);
}

TEST(ImageIo_Gray, PgmRoundTripQuantizes) {
    const auto dir = testing::scratch_dir("io_pgm");
    GrayImage img(3, 2);
    img.at(0, 0) = 0.0f;
    img.at(1, 0) = 1.0f;
    img.at(2, 1) = 0.5f;
    save_pgm(dir / "g.pgm", img);
    const auto back = load_gray(dir / "g.pgm");
    ASSERT_EQ(back.width(), 3);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 3; ++x) EXPECT_NEAR(back.at(x, y), img.at(x, y), 0.5 / 255 + 1e-6);
}

TEST(ImageIo_Gray, RgbPngLoadsAsLuma) {
    const auto dir = testing::scratch_dir("io_gray_rgb");
    RgbImage img(2, 1);
    img.at(0, 0, 0) = img.at(0, 0, 1) = img.at(0, 0, 2) = 255;
    save_rgb_png(dir / "c.png", img);
    const auto g = load_gray(dir / "c.png");
    EXPECT_NEAR(g.at(0, 0), 1.0, 1e-6);
    EXPECT_NEAR(g.at(1, 0), 0.0, 1e-6);
}

}  // namespace
}  // namespace rowexit
