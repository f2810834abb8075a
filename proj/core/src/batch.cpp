#include "rowexit/batch.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>

#include "rowexit/error.hpp"
#include "rowexit/replay.hpp"

namespace rowexit {

std::vector<TrialJob> plan_trials(const RunConfig& cfg) {
    std::vector<TrialJob> jobs;
    for (const auto regime : cfg.regimes) {
        for (int i = 0; i < cfg.trial_count; ++i) jobs.push_back({cfg.seed + static_cast<std::uint64_t>(i), regime});
    }
    return jobs;
}

TrialRow to_row(const TrialJob& job, const TrialResult& r) {
    return {job.seed, std::string(sim::to_string(job.regime)), r.stage1_halt_error, r.stage2_travel_error,
            r.abort.value_or(""), r.frames};
}

std::string trial_stem(const TrialJob& job) {
    return std::string(sim::to_string(job.regime)) + "_" + std::to_string(job.seed);
}

namespace {

TrialResult run_one(const RunConfig& cfg, const TrialJob& job, bool write_artifacts) {
    sim::WorldConfig world = cfg.world;
    world.headland_texture = job.regime;

    sim::TrialOptions options;
    options.start_offset_max = cfg.start_offset_max;

    std::ofstream events;
    if (write_artifacts && cfg.write_events) {
        const auto path = cfg.output_dir / "events" / (trial_stem(job) + ".jsonl");
        events.open(path, std::ios::trunc);
        if (!events) fail(ErrorCode::IoError, "cannot write " + path.string());
        options.events = [&events](const PipelineEvent& ev) { events << to_json_line(ev) << '\n'; };
    }
    std::optional<ReplayExporter> exporter;
    if (write_artifacts && cfg.export_replay) {
        exporter.emplace(cfg.output_dir / "replay" / trial_stem(job));
        options.frames = [&exporter](const sim::FrameRecord& f) { (*exporter)(f); };
    }

    TrialResult r = sim::run_trial(world, cfg.camera, cfg.intrinsics, cfg.stage, job.seed, options);
    if (events.is_open()) {
        events.flush();
        if (!events) fail(ErrorCode::IoError, "event log write failed for " + trial_stem(job));
    }
    return r;
}

}  // namespace

BatchResult run_batch(const RunConfig& cfg, bool write_artifacts) {
    cfg.validate();
    BatchResult out;
    out.jobs = plan_trials(cfg);
    out.results.resize(out.jobs.size());

    if (write_artifacts) {
        std::error_code ec;
        std::filesystem::create_directories(cfg.output_dir, ec);
        if (!ec && cfg.write_events) std::filesystem::create_directories(cfg.output_dir / "events", ec);
        if (ec) fail(ErrorCode::IoError, "cannot create " + cfg.output_dir.string() + ": " + ec.message());
    }

    unsigned workers = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs) : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(out.jobs.size()));

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < out.jobs.size(); i = next++) {
            try {
                out.results[i] = run_one(cfg, out.jobs[i], write_artifacts);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next = out.jobs.size();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (first_error) std::rethrow_exception(first_error);

    out.rows.reserve(out.jobs.size());
    for (std::size_t i = 0; i < out.jobs.size(); ++i) out.rows.push_back(to_row(out.jobs[i], out.results[i]));
    return out;
}

}  // namespace rowexit
