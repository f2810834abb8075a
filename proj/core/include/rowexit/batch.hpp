#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rowexit/run_config.hpp"
#include "rowexit/stats.hpp"
#include "rowexit/trial.hpp"

namespace rowexit {

struct TrialJob {
    std::uint64_t seed = 0;
    sim::HeadlandTexture regime = sim::HeadlandTexture::Verdant;
};

struct BatchResult {
    std::vector<TrialJob> jobs;        // regime order of the config, then seed order
    std::vector<TrialResult> results;  // parallel to jobs
    std::vector<TrialRow> rows;        // parallel to jobs
};

/// Trials of a run: for each configured regime, seeds seed .. seed + count - 1.
std::vector<TrialJob> plan_trials(const RunConfig& cfg);

TrialRow to_row(const TrialJob& job, const TrialResult& result);

/// File names used under output.dir for one trial's artifacts.
std::string trial_stem(const TrialJob& job);

/// Runs every planned trial on cfg.jobs threads. With `write_artifacts`, per-trial
/// event logs and replay exports are written under cfg.output_dir as configured.
/// Results are ordered as planned regardless of completion order.
BatchResult run_batch(const RunConfig& cfg, bool write_artifacts = true);

}  // namespace rowexit
