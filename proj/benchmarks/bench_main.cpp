#include <benchmark/benchmark.h>

#include "rowexit/matcher.hpp"
#include "rowexit/scale_space.hpp"
#include "rowexit/sift.hpp"
#include "rowexit/simulator.hpp"

namespace {

using namespace rowexit;

GrayImage frame_at(double before_end) {
    const sim::WorldConfig world;
    sim::CameraPose pose;
    pose.position = world.row_length - before_end;
    return rgb_to_gray(sim::render_frame(world, pose, CameraIntrinsics{}).rgb);
}

const GrayImage& reference_frame() {
    static const GrayImage img = frame_at(1.0);
    return img;
}

const GrayImage& current_frame() {
    static const GrayImage img = frame_at(0.8);
    return img;
}

void BM_GaussianBlur(benchmark::State& state) {
    const GrayImage& img = reference_frame();
    const double sigma = static_cast<double>(state.range(0)) / 10.0;
    for (auto _ : state) benchmark::DoNotOptimize(gaussian_blur(img, sigma));
}
BENCHMARK(BM_GaussianBlur)->Arg(10)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_ScaleSpace(benchmark::State& state) {
    const GrayImage& img = reference_frame();
    for (auto _ : state) benchmark::DoNotOptimize(build_scale_space(img, {}));
}
BENCHMARK(BM_ScaleSpace)->Unit(benchmark::kMillisecond);

void BM_DetectAndDescribe(benchmark::State& state) {
    const GrayImage& img = reference_frame();
    std::size_t n = 0;
    for (auto _ : state) {
        const auto f = detect_and_describe(img, {});
        n = f.size();
        benchmark::DoNotOptimize(f.data());
    }
    state.counters["keypoints"] = static_cast<double>(n);
}
BENCHMARK(BM_DetectAndDescribe)->Unit(benchmark::kMillisecond);

void BM_KnnMatch(benchmark::State& state) {
    const auto q = descriptors_of(detect_and_describe(reference_frame(), {}));
    const auto t = descriptors_of(detect_and_describe(current_frame(), {}));
    for (auto _ : state) benchmark::DoNotOptimize(knn_match(q, t));
    state.counters["pairs"] = static_cast<double>(q.size() * t.size());
}
BENCHMARK(BM_KnnMatch)->Unit(benchmark::kMillisecond);

void BM_LfsmScoreFullFrame(benchmark::State& state) {
    const GrayImage& ref = reference_frame();
    const GrayImage& cur = current_frame();
    const CropMask mask = CropMask::full(ref.height());
    for (auto _ : state) benchmark::DoNotOptimize(lfsm_score(ref, cur, mask));
}
BENCHMARK(BM_LfsmScoreFullFrame)->Unit(benchmark::kMillisecond);

void BM_ReferenceMatcherScore(benchmark::State& state) {
    // Stage loops keep the reference features; only the current frame is described.
    const GrayImage& cur = current_frame();
    const ReferenceMatcher matcher(reference_frame(), CropMask::full(cur.height()), {}, {});
    for (auto _ : state) benchmark::DoNotOptimize(matcher.score(cur));
}
BENCHMARK(BM_ReferenceMatcherScore)->Unit(benchmark::kMillisecond);

void BM_RenderFrame(benchmark::State& state) {
    const sim::WorldConfig world;
    sim::CameraPose pose;
    pose.position = world.row_length - 1.0;
    const CameraIntrinsics intr;
    for (auto _ : state) benchmark::DoNotOptimize(sim::render_frame(world, pose, intr));
}
BENCHMARK(BM_RenderFrame)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
