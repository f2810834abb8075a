#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "rowexit/image.hpp"
#include "rowexit/sift.hpp"

namespace rowexit {

struct MatcherConfig {
    int k = 2;
    double ratio_threshold = 0.7;
    /// A frame whose score is strictly below this halts the robot.
    int sim_threshold = 20;

    void validate() const;
};

struct MatchPair {
    std::size_t query_index = 0;
    std::size_t train_index = 0;
    double distance = 0;         // Euclidean, nearest neighbour
    double second_distance = 0;  // Euclidean, second-nearest neighbour

    friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

/// Number of ratio-test survivors between a reference and a current frame.
struct SimScore {
    std::size_t value = 0;

    friend auto operator<=>(const SimScore&, const SimScore&) = default;
};

/// Exhaustive two-nearest-neighbour search. One pair per query, in query order;
/// ties resolve to the lower train index. Queries get no pair when |train| < 2.
std::vector<MatchPair> knn_match(std::span<const Descriptor> query, std::span<const Descriptor> train,
                                 int k = 2);

/// Keeps pairs with distance < ratio * second_distance; zero-distance pairs always pass.
std::vector<MatchPair> ratio_filter(std::span<const MatchPair> matches, double ratio_threshold);

bool passes_ratio(const MatchPair& m, double ratio_threshold);

/// Crops both images with `mask`, extracts features, and counts ratio-test survivors.
SimScore lfsm_score(const GrayImage& img_ref, const GrayImage& img_cur, CropMask mask,
                    const FeatureParams& params = {}, const MatcherConfig& cfg = {});

/// LFSM with the reference side extracted once and reused for every query frame.
class ReferenceMatcher {
public:
    ReferenceMatcher(const GrayImage& reference, CropMask mask, FeatureParams params, MatcherConfig cfg);

    SimScore score(const GrayImage& current) const;
    /// Score plus the raw k-NN pairs (before ratio filtering) for inspection.
    SimScore score(const GrayImage& current, std::vector<MatchPair>* pairs,
                   std::vector<Feature>* current_features) const;

    const std::vector<Feature>& reference_features() const noexcept { return reference_; }
    CropMask mask() const noexcept { return mask_; }
    const MatcherConfig& config() const noexcept { return cfg_; }

private:
    CropMask mask_;
    FeatureParams params_;
    MatcherConfig cfg_;
    std::vector<Feature> reference_;
    std::vector<Descriptor> reference_desc_;
};

/// `match` subcommand dump: query_index,train_index,distance,second_distance,kept.
void write_matches_csv(std::ostream& out, std::span<const MatchPair> matches, double ratio_threshold);

}  // namespace rowexit
