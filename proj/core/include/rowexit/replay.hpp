#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "rowexit/trial.hpp"

namespace rowexit {

/// One manifest line. Paths are relative to the manifest's directory.
struct ManifestRecord {
    int frame_id = 0;
    std::string rgb_path;
    std::string depth_path;
    std::optional<double> odom_position_m;  // robot front along the track
    bool eor_trigger = false;
    std::optional<double> eor_position_m;   // true row end, enables the stage-1 error
    std::optional<int> y_eor;               // defaults to height / 2

    friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

std::string to_json_line(const ManifestRecord& record);
/// Throws ManifestError on malformed JSON or missing required fields.
ManifestRecord parse_manifest_line(const std::string& line, int lineno = 0);
std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path);

/// Feeds the manifest frames to the pipeline in order. Throws ManifestError when no
/// record carries the trigger flag, MissingFile/DecodeError for unreadable frames.
/// A sequence that ends before the run finishes is recorded as the abort
/// "SequenceExhausted".
TrialResult replay_manifest(const std::filesystem::path& manifest, const StageConfig& cfg,
                            const CameraIntrinsics& intr, EventSink sink = {});

/// Frame sink that writes PNG pairs and a manifest into `dir`.
class ReplayExporter {
public:
    explicit ReplayExporter(std::filesystem::path dir);

    void operator()(const sim::FrameRecord& frame);
    const std::filesystem::path& manifest_path() const noexcept { return manifest_path_; }

private:
    std::filesystem::path dir_;
    std::filesystem::path manifest_path_;
    std::ofstream manifest_;
};

}  // namespace rowexit
