#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rowexit/batch.hpp"
#include "rowexit/error.hpp"
#include "rowexit/image_io.hpp"
#include "rowexit/matcher.hpp"
#include "rowexit/replay.hpp"
#include "rowexit/run_config.hpp"
#include "rowexit/sift.hpp"
#include "rowexit/stats.hpp"

namespace {

using rowexit::ErrorCode;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitAbort = 4;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError:
        case ErrorCode::InvalidArgument: return kExitConfig;
        case ErrorCode::MissingFile:
        case ErrorCode::DecodeError:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::IoError:
        case ErrorCode::ManifestError:
        case ErrorCode::EmptyInput:
        case ErrorCode::SchemaError: return kExitIo;
        default: return kExitFailure;
    }
}

rowexit::RunConfig resolve_config(const std::string& path, const std::vector<std::string>& overrides) {
    rowexit::RunConfig cfg = path.empty() ? rowexit::RunConfig{} : rowexit::load_config(path);
    rowexit::apply_overrides(cfg, overrides);
    cfg.validate();
    return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) rowexit::fail(ErrorCode::IoError, "cannot write " + path.string());
}

nlohmann::ordered_json trial_json(const rowexit::TrialResult& r) {
    nlohmann::ordered_json j;
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(); };
    j["stage1_error_m"] = opt(r.stage1_halt_error);
    j["stage2_error_m"] = opt(r.stage2_travel_error);
    j["abort"] = r.abort ? nlohmann::ordered_json(*r.abort) : nlohmann::ordered_json();
    j["frames"] = r.frames;
    j["score_trace"] = r.score_trace;
    if (r.stage2_mask) j["stage2_mask"] = {r.stage2_mask->row_start, r.stage2_mask->row_end};
    if (r.span) j["d_fov_m"] = r.span->d_fov;
    return j;
}

int cmd_simulate(const std::string& config_path, const std::vector<std::string>& overrides, int jobs) {
    rowexit::RunConfig cfg = resolve_config(config_path, overrides);
    if (jobs >= 0) cfg.jobs = jobs;
    const rowexit::BatchResult batch = rowexit::run_batch(cfg);

    std::ostringstream csv;
    rowexit::write_trials_csv(csv, batch.rows);
    write_file(cfg.output_dir / "trials.csv", csv.str());
    write_file(cfg.output_dir / "config.effective", rowexit::to_config_text(cfg));
    const auto stats = rowexit::aggregate(batch.rows);
    write_file(cfg.output_dir / "report.json", rowexit::to_json(stats));
    std::cout << rowexit::to_summary(stats);
    std::cout << "wrote " << (cfg.output_dir / "trials.csv").string() << '\n';
    return kExitOk;
}

int cmd_replay(const std::string& manifest, const std::string& config_path, const std::vector<std::string>& overrides,
               const std::string& events_path) {
    const rowexit::RunConfig cfg = resolve_config(config_path, overrides);
    std::ofstream events;
    rowexit::EventSink sink;
    if (!events_path.empty()) {
        events.open(events_path, std::ios::trunc);
        if (!events) rowexit::fail(ErrorCode::IoError, "cannot write " + events_path);
        sink = [&events](const rowexit::PipelineEvent& ev) { events << rowexit::to_json_line(ev) << '\n'; };
    }
    const rowexit::TrialResult r = rowexit::replay_manifest(manifest, cfg.stage, cfg.intrinsics, sink);
    std::cout << trial_json(r).dump(2) << '\n';
    return r.abort ? kExitAbort : kExitOk;
}

int cmd_match(const std::string& a, const std::string& b, std::optional<int> row_start, std::optional<int> row_end,
              const std::string& matches_csv, const std::string& keypoints_csv, const std::string& config_path,
              const std::vector<std::string>& overrides) {
    const rowexit::RunConfig cfg = resolve_config(config_path, overrides);
    const rowexit::GrayImage img_a = rowexit::load_gray(a);
    const rowexit::GrayImage img_b = rowexit::load_gray(b);
    if (img_a.width() != img_b.width() || img_a.height() != img_b.height()) {
        rowexit::fail(ErrorCode::DimensionMismatch, "images differ in size");
    }
    const rowexit::CropMask mask{row_start.value_or(0), row_end.value_or(img_a.height())};
    const rowexit::ReferenceMatcher matcher(img_a, mask, cfg.stage.features, cfg.stage.matcher);
    std::vector<rowexit::MatchPair> pairs;
    std::vector<rowexit::Feature> current;
    const rowexit::SimScore score = matcher.score(img_b, &pairs, &current);

    std::cout << "score " << score.value << '\n';
    std::cout << "keypoints " << matcher.reference_features().size() << ' ' << current.size() << '\n';
    if (!matches_csv.empty()) {
        std::ostringstream out;
        rowexit::write_matches_csv(out, pairs, cfg.stage.matcher.ratio_threshold);
        if (matches_csv == "-") {
            std::cout << out.str();
        } else {
            write_file(matches_csv, out.str());
        }
    }
    if (!keypoints_csv.empty()) {
        std::ostringstream out;
        rowexit::write_keypoints_csv(out, matcher.reference_features());
        write_file(keypoints_csv, out.str());
    }
    return kExitOk;
}

int cmd_report(const std::string& csv_path, const std::string& output, bool summary) {
    std::ifstream in(csv_path);
    if (!in) rowexit::fail(ErrorCode::MissingFile, "cannot open " + csv_path);
    const auto rows = rowexit::read_trials_csv(in);
    const auto stats = rowexit::aggregate(rows);
    const std::string json = rowexit::to_json(stats);
    if (output.empty()) {
        std::cout << json;
    } else {
        write_file(output, json);
    }
    if (summary) std::cerr << rowexit::to_summary(stats);
    return kExitOk;
}

std::string keys_help() {
    std::string out = "Configuration keys (key = value):\n";
    for (const auto& k : rowexit::config_keys()) {
        out += "  " + std::string(k.name) + "\n      " + std::string(k.help) + "\n";
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vision-based crop row exit: simulation, replay and analysis"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    int jobs = -1;
    auto* simulate = app.add_subcommand("simulate", "Run seeded simulated trials and write trials.csv");
    simulate->add_option("config", config_path, "key = value configuration file");
    simulate->add_option("-s,--set", overrides, "override one key, key=value (repeatable)");
    simulate->add_option("-j,--jobs", jobs, "worker threads, overrides run.jobs");
    simulate->footer(keys_help());

    std::string manifest, events_path;
    auto* replay = app.add_subcommand("replay", "Feed a recorded frame manifest through the pipeline");
    replay->add_option("manifest", manifest, "JSON-lines frame manifest")->required();
    replay->add_option("-c,--config", config_path, "configuration file");
    replay->add_option("-s,--set", overrides, "override one key, key=value (repeatable)");
    replay->add_option("-e,--events", events_path, "write the JSON-lines event log here");

    std::string image_a, image_b, matches_csv, keypoints_csv;
    std::optional<int> row_start, row_end;
    auto* match = app.add_subcommand("match", "Score two images with the local feature similarity matcher");
    match->add_option("reference", image_a, "reference image (PNG or PGM)")->required();
    match->add_option("current", image_b, "current image (PNG or PGM)")->required();
    match->add_option("--row-start", row_start, "first mask row (default 0)");
    match->add_option("--row-end", row_end, "one past the last mask row (default height)");
    match->add_option("--matches", matches_csv, "write per-match CSV here ('-' for stdout)");
    match->add_option("--keypoints", keypoints_csv, "write reference keypoints CSV here");
    match->add_option("-c,--config", config_path, "configuration file for feature and matcher keys");
    match->add_option("-s,--set", overrides, "override one key, key=value (repeatable)");

    std::string csv_path, report_out;
    bool summary = false;
    auto* report = app.add_subcommand("report", "Aggregate a trials.csv into JSON statistics");
    report->add_option("csv", csv_path, "trial CSV written by simulate")->required();
    report->add_option("-o,--output", report_out, "write JSON here instead of stdout");
    report->add_flag("--summary", summary, "also print a summary in centimetres to stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*simulate) return cmd_simulate(config_path, overrides, jobs);
        if (*replay) return cmd_replay(manifest, config_path, overrides, events_path);
        if (*match) {
            return cmd_match(image_a, image_b, row_start, row_end, matches_csv, keypoints_csv, config_path, overrides);
        }
        if (*report) return cmd_report(csv_path, report_out, summary);
    } catch (const rowexit::Error& e) {
        std::cerr << "error: " << rowexit::to_string(e.code()) << ": " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}
