#include "rowexit/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace rowexit {

void MatcherConfig::validate() const {
    if (k != 2) fail(ErrorCode::InvalidArgument, "k-NN matching is defined for k = 2 only");
    if (!(ratio_threshold > 0 && ratio_threshold < 1)) {
        fail(ErrorCode::InvalidArgument, "ratio_threshold must lie in (0, 1)");
    }
    if (sim_threshold < 0) fail(ErrorCode::InvalidArgument, "sim_threshold must be >= 0");
}

std::vector<MatchPair> knn_match(std::span<const Descriptor> query, std::span<const Descriptor> train, int k) {
    if (k != 2) fail(ErrorCode::InvalidArgument, "k-NN matching is defined for k = 2 only");
    std::vector<MatchPair> out;
    if (train.size() < 2) return out;
    out.reserve(query.size());
    const std::size_t nt = train.size();

    // Dimension-major copy of the train set: the inner loop runs across train
    // descriptors, so it vectorizes while each pair still sums its 128 terms in order.
    std::vector<double> columns(kDescriptorSize * nt);
    for (std::size_t t = 0; t < nt; ++t) {
        for (int i = 0; i < kDescriptorSize; ++i) columns[i * nt + t] = train[t].values[i];
    }
    std::vector<double> acc(nt);
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < query.size(); ++q) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int i = 0; i < kDescriptorSize; ++i) {
            const double qv = query[q].values[i];
            const double* col = columns.data() + i * nt;
            double* a = acc.data();
            for (std::size_t t = 0; t < nt; ++t) {
                const double d = qv - col[t];
                a[t] += d * d;
            }
        }
        double best = inf;
        double second = inf;
        std::size_t best_idx = 0;
        for (std::size_t t = 0; t < nt; ++t) {
            const double d = acc[t];
            if (d < best) {
                second = best;
                best = d;
                best_idx = t;
            } else if (d < second) {
                second = d;
            }
        }
        out.push_back({q, best_idx, std::sqrt(best), std::sqrt(second)});
    }
    return out;
}

bool passes_ratio(const MatchPair& m, double ratio_threshold) {
    return m.distance == 0 || m.distance < ratio_threshold * m.second_distance;
}

std::vector<MatchPair> ratio_filter(std::span<const MatchPair> matches, double ratio_threshold) {
    std::vector<MatchPair> out;
    for (const MatchPair& m : matches) {
        if (passes_ratio(m, ratio_threshold)) out.push_back(m);
    }
    return out;
}

SimScore lfsm_score(const GrayImage& img_ref, const GrayImage& img_cur, CropMask mask,
                    const FeatureParams& params, const MatcherConfig& cfg) {
    return ReferenceMatcher(img_ref, mask, params, cfg).score(img_cur);
}

ReferenceMatcher::ReferenceMatcher(const GrayImage& reference, CropMask mask, FeatureParams params,
                                   MatcherConfig cfg)
    : mask_(mask), params_(params), cfg_(cfg) {
    cfg_.validate();
    reference_ = detect_and_describe(crop_rows(reference, mask_), params_);
    reference_desc_ = descriptors_of(reference_);
}

SimScore ReferenceMatcher::score(const GrayImage& current) const { return score(current, nullptr, nullptr); }

SimScore ReferenceMatcher::score(const GrayImage& current, std::vector<MatchPair>* pairs,
                                 std::vector<Feature>* current_features) const {
    std::vector<Feature> cur = detect_and_describe(crop_rows(current, mask_), params_);
    const std::vector<Descriptor> cur_desc = descriptors_of(cur);
    std::vector<MatchPair> knn = knn_match(reference_desc_, cur_desc, cfg_.k);
    SimScore s{ratio_filter(knn, cfg_.ratio_threshold).size()};
    if (pairs) *pairs = std::move(knn);
    if (current_features) *current_features = std::move(cur);
    return s;
}

void write_matches_csv(std::ostream& out, std::span<const MatchPair> matches, double ratio_threshold) {
    out << "query_index,train_index,distance,second_distance,kept\n";
    const auto old = out.precision(9);
    for (const MatchPair& m : matches) {
        out << m.query_index << ',' << m.train_index << ',' << m.distance << ',' << m.second_distance << ','
            << (passes_ratio(m, ratio_threshold) ? 1 : 0) << '\n';
    }
    out.precision(old);
}

}  // namespace rowexit
