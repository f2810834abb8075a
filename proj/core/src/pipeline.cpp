#include "rowexit/pipeline.hpp"

#include <json.hpp>

namespace rowexit {

std::string_view to_string(Phase phase) {
    switch (phase) {
        case Phase::Idle: return "idle";
        case Phase::Stage1: return "stage1";
        case Phase::Stage2: return "stage2";
        case Phase::Done: return "done";
    }
    return "unknown";
}

std::string_view to_string(StateLabel label) {
    switch (label) {
        case StateLabel::None: return "-";
        case StateLabel::A: return "A";
        case StateLabel::B: return "B";
        case StateLabel::C: return "C";
    }
    return "?";
}

void StageConfig::validate() const {
    if (!(linear_velocity > 0)) fail(ErrorCode::InvalidArgument, "linear_velocity must be > 0");
    if (!(frame_rate > 0)) fail(ErrorCode::InvalidArgument, "frame_rate must be > 0");
    if (max_frames < 1) fail(ErrorCode::InvalidArgument, "max_frames must be >= 1");
    if (halt_latency_frames < 0) fail(ErrorCode::InvalidArgument, "halt_latency_frames must be >= 0");
    matcher.validate();
    features.validate();
    robot.validate();
}

std::string to_json_line(const PipelineEvent& event) {
    nlohmann::ordered_json j;
    j["event"] = event.kind;
    j["frame"] = event.frame;
    j["t"] = event.sim_time;
    j["phase"] = to_string(event.phase);
    j["state"] = to_string(event.label);
    if (event.score) j["score"] = *event.score;
    if (event.decision) j["decision"] = *event.decision == StepDecision::Kind::Halt ? "halt" : "continue";
    if (event.mask) j["mask"] = {event.mask->row_start, event.mask->row_end};
    if (event.span) {
        j["d1"] = event.span->d1;
        j["d2"] = event.span->d2;
        j["d_fov"] = event.span->d_fov;
        j["alpha"] = event.span->alpha;
    }
    return j.dump();
}

RowExitPipeline::RowExitPipeline(StageConfig cfg, EventSink sink) : cfg_(std::move(cfg)), sink_(std::move(sink)) {
    cfg_.validate();
}

void RowExitPipeline::emit(PipelineEvent ev) const {
    if (!sink_) return;
    ev.sim_time = ev.frame / cfg_.frame_rate;
    sink_(ev);
}

void RowExitPipeline::on_eor_trigger(const RgbImage& rgb, EorEvent event) {
    if (state_.phase != Phase::Idle) {
        fail(ErrorCode::ContractViolation, "row-end trigger received outside the idle phase");
    }
    const int h = rgb.height();
    if (event.y_eor < 0 || event.y_eor >= h - kMinFeatureImageSide) {
        fail(ErrorCode::InvalidMask, "row end at y=" + std::to_string(event.y_eor) +
                                         " leaves fewer than 16 rows below it");
    }
    const CropMask mask{event.y_eor, h};
    GrayImage gray = rgb_to_gray(rgb);
    auto matcher = std::make_unique<ReferenceMatcher>(gray, mask, cfg_.features, cfg_.matcher);

    state_.phase = Phase::Stage1;
    state_.label = StateLabel::A;
    state_.reference = std::move(gray);
    state_.mask = mask;
    matcher_ = std::move(matcher);
    stage_frames_ = 0;
    emit({.kind = "eor_trigger", .phase = state_.phase, .label = state_.label, .frame = frame_, .mask = mask});
    ++frame_;
}

StepDecision RowExitPipeline::step(const RgbImage& rgb) {
    if (rgb.width() != state_.reference.width() || rgb.height() != state_.reference.height()) {
        fail(ErrorCode::DimensionMismatch, "frame size differs from the stage reference");
    }
    const SimScore score = matcher_->score(rgb_to_gray(rgb));
    const bool halt = score.value < static_cast<std::size_t>(cfg_.matcher.sim_threshold);
    return {halt ? StepDecision::Kind::Halt : StepDecision::Kind::Continue, score};
}

StepDecision RowExitPipeline::stage1_step(const RgbImage& rgb) {
    if (state_.phase != Phase::Stage1 || state_.label != StateLabel::A) {
        fail(ErrorCode::ContractViolation, "stage-1 step requires an active stage 1");
    }
    const StepDecision d = step(rgb);
    if (d.halted()) state_.label = StateLabel::B;
    emit({.kind = "step", .phase = state_.phase, .label = state_.label, .frame = frame_,
          .score = d.score.value, .decision = d.kind});
    ++frame_;
    if (!d.halted() && ++stage_frames_ >= cfg_.max_frames) {
        fail(ErrorCode::MaxFramesExceeded, "stage 1 did not halt within " + std::to_string(cfg_.max_frames) + " frames");
    }
    return d;
}

const HeadlandSpan& RowExitPipeline::stage2_init(const RgbImage& rgb, const DepthImage& depth,
                                                 const CameraIntrinsics& intr) {
    if (state_.phase != Phase::Stage1 || state_.label != StateLabel::B) {
        fail(ErrorCode::ContractViolation, "stage 2 can only start after the stage-1 halt");
    }
    if (rgb.width() != depth.width() || rgb.height() != depth.height()) {
        fail(ErrorCode::DimensionMismatch, "colour and depth frames differ in size");
    }
    const HeadlandSpan span = estimate_span(depth, intr, cfg_.max_range_mm);
    const CropMask mask = stage2_mask(span, cfg_.robot, rgb.height());
    GrayImage gray = rgb_to_gray(rgb);
    auto matcher = std::make_unique<ReferenceMatcher>(gray, mask, cfg_.features, cfg_.matcher);

    state_.phase = Phase::Stage2;
    state_.reference = std::move(gray);
    state_.mask = mask;
    state_.span = span;
    matcher_ = std::move(matcher);
    stage_frames_ = 0;
    emit({.kind = "stage2_init", .phase = state_.phase, .label = state_.label, .frame = frame_, .mask = mask,
          .span = span});
    ++frame_;
    return *state_.span;
}

StepDecision RowExitPipeline::stage2_step(const RgbImage& rgb) {
    if (state_.phase != Phase::Stage2) {
        fail(ErrorCode::ContractViolation, "stage-2 step requires an active stage 2");
    }
    const StepDecision d = step(rgb);
    if (d.halted()) {
        state_.phase = Phase::Done;
        state_.label = StateLabel::C;
        matcher_.reset();
    }
    emit({.kind = "step", .phase = state_.phase, .label = state_.label, .frame = frame_,
          .score = d.score.value, .decision = d.kind});
    ++frame_;
    if (!d.halted() && ++stage_frames_ >= cfg_.max_frames) {
        fail(ErrorCode::MaxFramesExceeded, "stage 2 did not halt within " + std::to_string(cfg_.max_frames) + " frames");
    }
    return d;
}

}  // namespace rowexit
