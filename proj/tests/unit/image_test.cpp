#include <gtest/gtest.h>

#include "rowexit/image.hpp"

namespace rowexit {
namespace {

TEST(Image_CropRows, CopiesRequestedSpan) {
    Image<int> img(3, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 3; ++x) img.at(x, y) = 10 * y + x;
    const auto out = crop_rows(img, CropMask{1, 3});
    ASSERT_EQ(out.width(), 3);
    ASSERT_EQ(out.height(), 2);
    EXPECT_EQ(out.at(0, 0), 10);
    EXPECT_EQ(out.at(2, 1), 22);
}

TEST(Image_CropRows, RejectsInvalidSpans) {
    const GrayImage img(8, 8);
    for (const CropMask m : {CropMask{-1, 4}, CropMask{4, 4}, CropMask{5, 3}, CropMask{0, 9}}) {
        try {
            (void)crop_rows(img, m);
            FAIL() << "accepted [" << m.row_start << ", " << m.row_end << ")";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::InvalidMask);
        }
    }
}

TEST(Image_CropRows, FullMaskIsIdentity) {
    GrayImage img(5, 7, 0.25f);
    img.at(4, 6) = 1.0f;
    EXPECT_EQ(crop_rows(img, CropMask::full(7)), img);
}

TEST(Image_Construction, BufferSizeMustMatch) {
    EXPECT_THROW(GrayImage(4, 4, std::vector<float>(15)), Error);
}

TEST(Image_RgbToGray, UsesLumaWeights) {
    RgbImage rgb(3, 1);
    rgb.at(0, 0, 0) = 255;
    rgb.at(1, 0, 1) = 255;
    rgb.at(2, 0, 0) = rgb.at(2, 0, 1) = rgb.at(2, 0, 2) = 255;
    const auto g = rgb_to_gray(rgb);
    EXPECT_NEAR(g.at(0, 0), 0.299, 1e-6);
    EXPECT_NEAR(g.at(1, 0), 0.587, 1e-6);
    EXPECT_NEAR(g.at(2, 0), 1.0, 1e-6);
}

}  // namespace
}  // namespace rowexit
