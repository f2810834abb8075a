#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rowexit/headland.hpp"

namespace rowexit {
namespace {

// Law of cosines written out directly, in long double.
double dfov_reference(double d1, double d2, double alpha) {
    const long double a = d1, b = d2;
    return static_cast<double>(std::sqrt(a * a + b * b - 2 * a * b * std::cos(static_cast<long double>(alpha))));
}

DepthImage two_level_depth(int w, int h, std::uint16_t near_mm, std::uint16_t far_mm) {
    DepthImage d(w, h);
    for (int y = 0; y < h; ++y) {
        const auto v = static_cast<std::uint16_t>(far_mm + (near_mm - far_mm) * y / (h - 1));
        for (int x = 0; x < w; ++x) d.at(x, y) = v;
    }
    return d;
}

TEST(Headland_RowMedian, IgnoresInvalidSamples) {
    DepthImage d(4, 1);
    const std::uint16_t row[] = {1200, 0, 1250, 1300};
    std::copy(std::begin(row), std::end(row), d.row(0).begin());
    EXPECT_DOUBLE_EQ(row_median_depth(d, 0), 1.25);
}

TEST(Headland_RowMedian, EvenCountAveragesMiddlePair) {
    DepthImage d(2, 1);
    d.at(0, 0) = 1000;
    d.at(1, 0) = 2000;
    EXPECT_DOUBLE_EQ(row_median_depth(d, 0), 1.5);
}

TEST(Headland_RowMedian, OutOfRangeCountsAsInvalid) {
    DepthImage d(3, 1);
    d.at(0, 0) = 900;
    d.at(1, 0) = 60000;
    d.at(2, 0) = 1100;
    EXPECT_DOUBLE_EQ(row_median_depth(d, 0, 10000), 1.0);
}

TEST(Headland_RowMedian, MostlyEmptyRowIsInsufficient) {
    DepthImage d(4, 2);
    d.at(0, 1) = 1000;
    for (int row : {0, 1}) {
        try {
            (void)row_median_depth(d, row);
            FAIL() << "row " << row;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::InsufficientDepth);
        }
    }
}

TEST(Headland_RowMedian, PermutationInvariant) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> mm(0, 9000);
    DepthImage d(31, 1);
    for (auto& v : d.pixels()) v = static_cast<std::uint16_t>(mm(rng) < 500 ? 0 : mm(rng));
    const double m = row_median_depth(d, 0);
    for (int i = 0; i < 20; ++i) {
        std::shuffle(d.pixels().begin(), d.pixels().end(), rng);
        EXPECT_EQ(row_median_depth(d, 0), m);
    }
}

TEST(Headland_Dfov, WorkedExamples) {
    EXPECT_NEAR(estimate_dfov(2, 2, deg_to_rad(60)), 2.0, 1e-12);
    EXPECT_NEAR(estimate_dfov(1, 3, 0), 2.0, 1e-12);
    EXPECT_NEAR(estimate_dfov(1, 3, deg_to_rad(58)), 2.611606, 1e-6);
    EXPECT_NEAR(estimate_dfov(3, 4, std::numbers::pi / 2), 5.0, 1e-12);
}

TEST(Headland_Dfov, SymmetricAndTriangleBounded) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> depth(0.05, 20.0), angle(0.0, std::numbers::pi);
    for (int i = 0; i < 100000; ++i) {
        const double a = depth(rng), b = depth(rng), t = angle(rng);
        const double d = estimate_dfov(a, b, t);
        ASSERT_EQ(d, estimate_dfov(b, a, t));
        ASSERT_GE(d, std::abs(a - b) - 1e-12);
        ASSERT_LE(d, a + b + 1e-12);
        ASSERT_NEAR(d, dfov_reference(a, b, t), 1e-9 * std::max(1.0, d));
    }
}

TEST(Headland_Dfov, ContinuousInEachArgument) {
    const double h = 1e-7;
    for (double t : {0.0, 0.3, 1.0, 2.5}) {
        const double d = estimate_dfov(1.3, 2.9, t);
        EXPECT_NEAR(estimate_dfov(1.3 + h, 2.9, t), d, 10 * h);
        EXPECT_NEAR(estimate_dfov(1.3, 2.9 + h, t), d, 10 * h);
        EXPECT_NEAR(estimate_dfov(1.3, 2.9, t + h), d, 10 * h);
    }
}

TEST(Headland_Dfov, EqualDepthsAtZeroAngle) {
    for (double d : {0.0, 0.4, 3.0, 17.5}) EXPECT_EQ(estimate_dfov(d, d, 0), 0.0);
}

TEST(Headland_Dfov, DerivativesMatchLawOfCosines) {
    // Central differences against the analytic partials of sqrt(a^2 + b^2 - 2ab cos t).
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> depth(0.1, 20.0), angle(0.05, std::numbers::pi - 0.05);
    const double h = 1e-6;
    int checked = 0;
    while (checked < 100) {
        const double a = depth(rng), b = depth(rng), t = angle(rng);
        const double d = estimate_dfov(a, b, t);
        if (d < 0.1) continue;
        ++checked;
        const double da = (a - b * std::cos(t)) / d;
        const double db = (b - a * std::cos(t)) / d;
        const double dt = a * b * std::sin(t) / d;
        const double na = (estimate_dfov(a + h, b, t) - estimate_dfov(a - h, b, t)) / (2 * h);
        const double nb = (estimate_dfov(a, b + h, t) - estimate_dfov(a, b - h, t)) / (2 * h);
        const double nt = (estimate_dfov(a, b, t + h) - estimate_dfov(a, b, t - h)) / (2 * h);
        EXPECT_NEAR(na, da, 1e-4 * std::max(1.0, std::abs(da)));
        EXPECT_NEAR(nb, db, 1e-4 * std::max(1.0, std::abs(db)));
        EXPECT_NEAR(nt, dt, 1e-4 * std::max(1.0, std::abs(dt)));
    }
}

TEST(Headland_Span, UsesBottomAndTopRows) {
    CameraIntrinsics intr;
    intr.width = 40;
    intr.height = 30;
    const auto span = estimate_span(two_level_depth(40, 30, 1000, 3000), intr);
    EXPECT_EQ(span.near_row, 29);
    EXPECT_EQ(span.far_row, 0);
    EXPECT_DOUBLE_EQ(span.d1, 1.0);
    EXPECT_DOUBLE_EQ(span.d2, 3.0);
    EXPECT_DOUBLE_EQ(span.alpha, intr.vertical_fov);
    EXPECT_NEAR(span.d_fov, 2.611606, 1e-6);
}

TEST(Headland_Span, SkyRowsNarrowTheAngle) {
    CameraIntrinsics intr;
    intr.width = 40;
    intr.height = 120;
    auto depth = two_level_depth(40, 120, 1000, 3000);
    for (int y = 0; y < 30; ++y)
        for (int x = 0; x < 40; ++x) depth.at(x, y) = 0;
    const auto span = estimate_span(depth, intr);
    EXPECT_EQ(span.far_row, 30);
    const double f = 60.0 / std::tan(intr.vertical_fov / 2);
    EXPECT_NEAR(span.alpha, std::atan(29.5 / f) + std::atan(59.5 / f), 1e-12);
    EXPECT_LT(span.alpha, intr.vertical_fov);
    EXPECT_NEAR(span.d_fov, estimate_dfov(span.d1, span.d2, span.alpha), 1e-15);
}

TEST(Headland_Span, EmptyDepthIsInsufficient) {
    CameraIntrinsics intr;
    intr.width = 40;
    intr.height = 30;
    try {
        (void)estimate_span(DepthImage(40, 30), intr);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientDepth);
    }
}

TEST(Headland_Span, IntrinsicsMustMatchFrame) {
    EXPECT_THROW((void)estimate_span(two_level_depth(40, 30, 1000, 2000), CameraIntrinsics{}), Error);
}

TEST(Headland_Mask, BottomFractionOfOneRobotLength) {
    HeadlandSpan span;
    span.d_fov = estimate_dfov(1, 3, deg_to_rad(58));
    const auto m = stage2_mask(span, RobotGeometry{1.0, 1.0}, 480);
    EXPECT_EQ(m.row_start, 296);
    EXPECT_EQ(m.row_end, 480);
}

TEST(Headland_Mask, ExactFitCoversWholeFrame) {
    HeadlandSpan span;
    span.d_fov = 1.0;
    EXPECT_EQ(stage2_mask(span, RobotGeometry{1.0, 1.0}, 480), CropMask::full(480));
}

TEST(Headland_Mask, ShortHeadlandRejected) {
    HeadlandSpan span;
    span.d_fov = 0.8;
    try {
        (void)stage2_mask(span, RobotGeometry{1.0, 1.0}, 480);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::HeadlandTooShort);
    }
}

TEST(Headland_Mask, ShrinksAsHeadlandGrows) {
    int last_rows = 481;
    for (double d = 1.0; d < 12.0; d += 0.05) {
        HeadlandSpan span;
        span.d_fov = d;
        const auto m = stage2_mask(span, RobotGeometry{1.0, 1.0}, 480);
        ASSERT_TRUE(m.valid_for(480));
        ASSERT_EQ(m.row_end, 480);
        ASSERT_LE(m.rows(), last_rows);
        last_rows = m.rows();
    }
}

TEST(Headland_Robot, TargetDistanceScales) {
    EXPECT_DOUBLE_EQ((RobotGeometry{0.8, 1.5}.target_distance()), 1.2);
    EXPECT_THROW((RobotGeometry{0.0, 1.0}.validate()), Error);
    EXPECT_THROW((RobotGeometry{1.0, -1.0}.validate()), Error);
}

}  // namespace
}  // namespace rowexit
