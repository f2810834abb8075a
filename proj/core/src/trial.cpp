#include "rowexit/trial.hpp"

#include <cmath>
#include <random>

#include "rowexit/error.hpp"

namespace rowexit {

TrialDriver::TrialDriver(StageConfig cfg, CameraIntrinsics intr, std::optional<double> eor_position, EventSink sink)
    : intr_(intr), eor_position_(eor_position), pipeline_(std::move(cfg), std::move(sink)) {
    intr_.validate();
}

void TrialDriver::abort(const std::string& reason) {
    result_.abort = reason;
    finished_ = true;
}

void TrialDriver::settle(const DriverFrame& f) {
    if (pipeline_.phase() == Phase::Stage1) {
        halt1_front_ = f.front_position;
        if (eor_position_ && f.front_position) result_.stage1_halt_error = *f.front_position - *eor_position_;
        result_.span = pipeline_.stage2_init(f.rgb, f.depth, intr_);
        result_.stage2_mask = pipeline_.state().mask;
    } else {
        if (halt1_front_ && f.front_position) {
            result_.stage2_travel_error =
                (*f.front_position - *halt1_front_) - pipeline_.config().robot.target_distance();
        }
        finished_ = true;
    }
}

bool TrialDriver::feed(const DriverFrame& f) {
    if (finished_) return true;
    try {
        if (coast_remaining_ > 0) {
            if (--coast_remaining_ == 0) settle(f);
            return finished_;
        }
        StepDecision d;
        switch (pipeline_.phase()) {
            case Phase::Idle:
                if (f.eor_trigger) pipeline_.on_eor_trigger(f.rgb, {f.y_eor});
                return false;
            case Phase::Stage1: d = pipeline_.stage1_step(f.rgb); break;
            case Phase::Stage2: d = pipeline_.stage2_step(f.rgb); break;
            case Phase::Done: finished_ = true; return true;
        }
        result_.score_trace.push_back(d.score.value);
        result_.frames = static_cast<int>(result_.score_trace.size());
        if (d.halted()) {
            coast_remaining_ = pipeline_.config().halt_latency_frames;
            if (coast_remaining_ == 0) settle(f);
        }
    } catch (const Error& e) {
        abort(std::string(to_string(e.code())));
    }
    return finished_;
}

namespace sim {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2));
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double trigger_position(const WorldConfig& world, const CameraPose& pose, const CameraIntrinsics& intr, int y_eor) {
    const double ahead = ground_distance_at_row(pose, intr, y_eor);
    if (!std::isfinite(ahead) || ahead <= 0) {
        fail(ErrorCode::InvalidArgument, "row y_eor does not see the ground ahead");
    }
    return world.row_length - ahead;
}

TrialResult run_trial(const WorldConfig& world, const CameraPose& camera, const CameraIntrinsics& intr,
                      const StageConfig& cfg, std::uint64_t seed, const TrialOptions& options) {
    world.validate();
    camera.validate();
    intr.validate();
    cfg.validate();
    if (!(options.start_offset_max > 0)) fail(ErrorCode::InvalidArgument, "start_offset_max must be > 0");

    WorldConfig trial_world = world;
    trial_world.texture_seed = mix_seed(world.texture_seed, seed);

    std::mt19937_64 rng(seed);
    const double offset = std::uniform_real_distribution<double>(0.0, options.start_offset_max)(rng);
    const int y_eor = intr.height / 2;
    const double x_trig = trigger_position(world, camera, intr, y_eor);
    const double x0 = x_trig - offset;
    const double step = cfg.step_distance();
    const double front = front_offset(camera, intr);

    // First frame at or past the trigger pose; earlier frames never reach the pipeline.
    int k = static_cast<int>(std::floor(offset / step));
    while (k > 0 && x0 + (k - 1) * step >= x_trig) --k;
    while (x0 + k * step < x_trig) ++k;

    TrialDriver driver(cfg, intr, world.row_length, options.events);
    const int last = k + 2 * cfg.max_frames + 2;
    for (bool first = true; k <= last && !driver.finished(); ++k, first = false) {
        CameraPose pose = camera;
        pose.position = x0 + k * step;
        const RenderedFrame frame = render_frame(trial_world, pose, intr, cfg.max_range_mm);
        const double front_pos = pose.position + front;
        if (options.frames) {
            options.frames({k, frame.rgb, frame.depth, front_pos, first, world.row_length, y_eor});
        }
        driver.feed({frame.rgb, frame.depth, front_pos, first, y_eor});
    }
    return driver.result();
}

}  // namespace sim
}  // namespace rowexit
