#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rowexit/pipeline.hpp"
#include "rowexit/simulator.hpp"

namespace rowexit {

/// Outcome of one row-exit run. Errors are in metres; positive means overshoot.
struct TrialResult {
    std::optional<double> stage1_halt_error;    // front at stage-1 halt - true row end
    std::optional<double> stage2_travel_error;  // stage-2 travel - m * l
    std::vector<std::size_t> score_trace;       // one score per matched frame; coasting frames excluded
    std::optional<std::string> abort;           // error code name when the run stopped early
    int frames = 0;                             // == score_trace.size()
    std::optional<CropMask> stage2_mask;
    std::optional<HeadlandSpan> span;

    friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

/// One frame as seen by the driver. `front_position` is the robot front along the
/// track in metres (odometry or ground truth), absent when unknown.
struct DriverFrame {
    const RgbImage& rgb;
    const DepthImage& depth;
    std::optional<double> front_position;
    bool eor_trigger = false;
    int y_eor = 0;
};

/// Feeds an ordered frame sequence to a RowExitPipeline and records a TrialResult.
/// Frames before the first trigger are ignored. After each halt decision the robot
/// coasts for cfg.halt_latency_frames frames; the frame where it stands still gives
/// the halt position and, after stage 1, the stage-2 reference. Pipeline errors end
/// the run and are recorded as the abort.
class TrialDriver {
public:
    TrialDriver(StageConfig cfg, CameraIntrinsics intr, std::optional<double> eor_position, EventSink sink = {});

    /// Returns true once the run is finished (Done or aborted); later frames are ignored.
    bool feed(const DriverFrame& frame);
    bool finished() const noexcept { return finished_; }
    bool triggered() const noexcept { return pipeline_.phase() != Phase::Idle; }
    const RowExitPipeline& pipeline() const noexcept { return pipeline_; }
    const TrialResult& result() const noexcept { return result_; }

private:
    void abort(const std::string& reason);
    void settle(const DriverFrame& frame);

    CameraIntrinsics intr_;
    std::optional<double> eor_position_;
    RowExitPipeline pipeline_;
    TrialResult result_;
    std::optional<double> halt1_front_;
    int coast_remaining_ = 0;
    bool finished_ = false;
};

namespace sim {

/// Everything a trial hands to an exporter for one rendered frame.
struct FrameRecord {
    int frame_id = 0;
    const RgbImage& rgb;
    const DepthImage& depth;
    double front_position = 0;  // ground-truth robot front, metres
    bool eor_trigger = false;
    double eor_position = 0;    // true row end, metres
    int y_eor = 0;
};

using FrameSink = std::function<void(const FrameRecord&)>;

struct TrialOptions {
    double start_offset_max = 1.0;  // start is U[0, start_offset_max) before the trigger pose
    EventSink events;
    FrameSink frames;
};

/// Derives the texture seed of one trial from the world seed and the trial seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Camera x at which the row end projects onto image row y_eor.
double trigger_position(const WorldConfig& world, const CameraPose& pose, const CameraIntrinsics& intr, int y_eor);

/// Simulated run: the robot starts a seeded random distance before the trigger pose
/// and advances exactly cfg.step_distance() per frame. The first frame at or past the
/// trigger pose fires the row-end event with y_eor = height / 2.
TrialResult run_trial(const WorldConfig& world, const CameraPose& camera, const CameraIntrinsics& intr,
                      const StageConfig& cfg, std::uint64_t seed, const TrialOptions& options = {});

}  // namespace sim
}  // namespace rowexit
