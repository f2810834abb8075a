#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "rowexit/headland.hpp"
#include "rowexit/image.hpp"
#include "rowexit/matcher.hpp"
#include "rowexit/scale_space.hpp"

namespace rowexit {

enum class Phase { Idle, Stage1, Stage2, Done };

/// Furthest traversal state reached: A = row end detected, B = robot at the row end,
/// C = robot one body length into the headland.
enum class StateLabel { None, A, B, C };

std::string_view to_string(Phase phase);
std::string_view to_string(StateLabel label);

/// Row-end detector output: image row where the end of the crop row sits.
struct EorEvent {
    int y_eor = 0;
};

struct StageConfig {
    double linear_velocity = 0.3;  // m/s
    double frame_rate = 1.5;         // frames/s
    MatcherConfig matcher;
    FeatureParams features;
    RobotGeometry robot;
    /// Frames allowed per stage before the run is abandoned (MaxFramesExceeded).
    int max_frames = 400;
    std::uint16_t max_range_mm = kDefaultMaxRangeMm;
    /// Frames between a halt decision and the robot standing still. The pipeline is
    /// the frame-rate bottleneck, so the robot keeps moving while a frame is scored.
    int halt_latency_frames = 1;

    double step_distance() const { return linear_velocity / frame_rate; }
    void validate() const;
};

struct StepDecision {
    enum class Kind { Continue, Halt };
    Kind kind = Kind::Continue;
    SimScore score;

    bool halted() const noexcept { return kind == Kind::Halt; }
};

struct TraversalState {
    Phase phase = Phase::Idle;
    StateLabel label = StateLabel::None;
    GrayImage reference;  // full-frame luminance of the stage reference
    CropMask mask;
    std::optional<HeadlandSpan> span{};
};

/// One record of the structured step log.
struct PipelineEvent {
    std::string_view kind;  // eor_trigger | step | stage2_init
    Phase phase = Phase::Idle;
    StateLabel label = StateLabel::None;
    int frame = 0;
    double sim_time = 0;  // frame / frame_rate, seconds
    std::optional<std::size_t> score{};
    std::optional<StepDecision::Kind> decision{};
    std::optional<CropMask> mask{};
    std::optional<HeadlandSpan> span{};
};

/// Single JSON object, no trailing newline.
std::string to_json_line(const PipelineEvent& event);

using EventSink = std::function<void(const PipelineEvent&)>;

/// Row-exit controller: Idle -> Stage1 (A) -> halt (B) -> Stage2 -> halt (C, Done).
/// Processes frames strictly in order; not safe for concurrent use.
class RowExitPipeline {
public:
    explicit RowExitPipeline(StageConfig cfg, EventSink sink = {});

    void on_eor_trigger(const RgbImage& rgb, EorEvent event);
    StepDecision stage1_step(const RgbImage& rgb);
    const HeadlandSpan& stage2_init(const RgbImage& rgb, const DepthImage& depth, const CameraIntrinsics& intr);
    StepDecision stage2_step(const RgbImage& rgb);

    const TraversalState& state() const noexcept { return state_; }
    Phase phase() const noexcept { return state_.phase; }
    StateLabel label() const noexcept { return state_.label; }
    const StageConfig& config() const noexcept { return cfg_; }
    /// Frames consumed so far, including the trigger and stage-2 reference frames.
    int frames() const noexcept { return frame_; }

private:
    StepDecision step(const RgbImage& rgb);
    void emit(PipelineEvent ev) const;

    StageConfig cfg_;
    EventSink sink_;
    TraversalState state_;
    std::unique_ptr<ReferenceMatcher> matcher_;
    int frame_ = 0;
    int stage_frames_ = 0;
};

}  // namespace rowexit
