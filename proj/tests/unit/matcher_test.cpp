#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "rowexit/matcher.hpp"
#include "test_support.hpp"

namespace rowexit {
namespace {

MatchPair pair_with(double d1, double d2) {
    MatchPair m;
    m.distance = d1;
    m.second_distance = d2;
    return m;
}

Descriptor axis(int i, float v = 1.0f) {
    Descriptor d;
    d.values[static_cast<std::size_t>(i)] = v;
    return d;
}

TEST(Matcher_Ratio, StrictThreshold) {
    EXPECT_TRUE(passes_ratio(pair_with(0.3, 1.0), 0.7));
    EXPECT_FALSE(passes_ratio(pair_with(0.7, 1.0), 0.7));
    EXPECT_FALSE(passes_ratio(pair_with(0.9, 1.0), 0.7));
    EXPECT_TRUE(passes_ratio(pair_with(0.0, 0.0), 0.7));
}

TEST(Matcher_Knn, TwoNearestInOrder) {
    const std::vector<Descriptor> train{axis(0), axis(1), axis(0, 0.9f)};
    const std::vector<Descriptor> query{axis(0)};
    const auto m = knn_match(query, train);
    ASSERT_EQ(m.size(), 1u);
    EXPECT_EQ(m[0].train_index, 0u);
    EXPECT_DOUBLE_EQ(m[0].distance, 0.0);
    EXPECT_NEAR(m[0].second_distance, 0.1, 1e-6);
}

TEST(Matcher_Knn, TiesGoToLowerIndex) {
    const std::vector<Descriptor> train{axis(1), axis(2), axis(1)};
    const auto m = knn_match(std::vector<Descriptor>{axis(3)}, train);
    ASSERT_EQ(m.size(), 1u);
    EXPECT_EQ(m[0].train_index, 0u);
}

TEST(Matcher_Knn, FewerThanTwoTrainDescriptors) {
    const std::vector<Descriptor> q{axis(0), axis(1)};
    EXPECT_TRUE(knn_match(q, std::vector<Descriptor>{axis(0)}).empty());
    EXPECT_TRUE(knn_match(q, std::vector<Descriptor>{}).empty());
    EXPECT_TRUE(knn_match(std::vector<Descriptor>{}, q).empty());
}

TEST(Matcher_Knn, AgreesWithBruteForce) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const auto q = testing::random_descriptors(rng, 40);
        const auto t = testing::random_descriptors(rng, 35);
        const auto got = knn_match(q, t);
        const auto kept = ratio_filter(got, 0.7);
        const auto want = testing::oracle_match(q, t, 0.7);
        ASSERT_EQ(got.size(), want.size());
        std::size_t want_kept = 0;
        for (std::size_t i = 0; i < got.size(); ++i) {
            EXPECT_EQ(got[i].query_index, want[i].query);
            EXPECT_EQ(got[i].train_index, want[i].train);
            EXPECT_EQ(passes_ratio(got[i], 0.7), want[i].kept);
            want_kept += want[i].kept;
        }
        EXPECT_EQ(kept.size(), want_kept);
    }
}

TEST(Matcher_Knn, SelfMatchHasZeroDistance) {
    const auto d = descriptors_of(detect_and_describe(testing::blob_texture(160, 120, 5)));
    ASSERT_GT(d.size(), 30u);
    const auto m = knn_match(d, d);
    ASSERT_EQ(m.size(), d.size());
    for (std::size_t i = 0; i < m.size(); ++i) EXPECT_LT(m[i].distance, 1e-6);
}

TEST(Matcher_Knn, PermutingTrainPermutesIndices) {
    std::mt19937_64 rng(7);
    const auto q = testing::unit_descriptors(rng, 60);
    auto t = testing::unit_descriptors(rng, 80);
    std::vector<std::size_t> perm(t.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Descriptor> shuffled;
    for (std::size_t p : perm) shuffled.push_back(t[p]);
    const auto a = knn_match(q, t);
    const auto b = knn_match(q, shuffled);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(perm[b[i].train_index], a[i].train_index);
        EXPECT_EQ(b[i].distance, a[i].distance);
        EXPECT_EQ(b[i].second_distance, a[i].second_distance);
    }
}

TEST(Matcher_Knn, PermutingQueriesPermutesRows) {
    std::mt19937_64 rng(8);
    auto q = testing::unit_descriptors(rng, 50);
    const auto t = testing::planted_train(rng, q, 40);
    const auto a = knn_match(q, t);
    std::reverse(q.begin(), q.end());
    const auto b = knn_match(q, t);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& r = b[a.size() - 1 - i];
        EXPECT_EQ(r.train_index, a[i].train_index);
        EXPECT_EQ(r.distance, a[i].distance);
    }
}

TEST(Matcher_Score, SelfMatchCountsEveryKeypoint) {
    const auto img = testing::blob_texture(160, 120, 17);
    const auto n = detect_and_describe(img).size();
    ASSERT_GT(n, 20u);
    EXPECT_EQ(lfsm_score(img, img, CropMask::full(120)).value, n);
}

TEST(Matcher_Score, TexturelessFramesScoreZero) {
    const GrayImage flat(160, 120, 0.3f);
    EXPECT_EQ(lfsm_score(flat, flat, CropMask::full(120)).value, 0u);

    // Texture only in the top half; a bottom-half mask sees nothing.
    auto img = testing::blob_texture(160, 120, 5);
    for (int y = 60; y < 120; ++y)
        for (int x = 0; x < 160; ++x) img.at(x, y) = 0.3f;
    EXPECT_EQ(lfsm_score(img, img, CropMask{60, 120}).value, 0u);
    EXPECT_GT(lfsm_score(img, img, CropMask{0, 60}).value, 0u);
}

TEST(Matcher_Score, UnrelatedTexturesScoreLow) {
    const auto a = testing::blob_texture(160, 120, 1);
    const auto b = testing::blob_texture(160, 120, 2);
    const auto self = lfsm_score(a, a, CropMask::full(120)).value;
    EXPECT_LT(lfsm_score(a, b, CropMask::full(120)).value * 5, self);
}

TEST(Matcher_Score, ReferenceMatcherAgreesWithOneShot) {
    const auto a = testing::blob_texture(160, 120, 1);
    const auto b = testing::window(testing::blob_texture(170, 120, 1), 3, 0, 160, 120);
    const ReferenceMatcher rm(a, CropMask{20, 110}, {}, {});
    EXPECT_EQ(rm.score(b), lfsm_score(a, b, CropMask{20, 110}));
}

TEST(Matcher_Config, Validation) {
    MatcherConfig c;
    c.ratio_threshold = 0;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.sim_threshold = -1;
    EXPECT_THROW(c.validate(), Error);
}

}  // namespace
}  // namespace rowexit
