#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "rowexit/pipeline.hpp"
#include "rowexit/simulator.hpp"

namespace rowexit {

/// Flat `key = value` run configuration. Every key has a default; see config_keys().
struct RunConfig {
    sim::WorldConfig world;
    sim::CameraPose camera;
    CameraIntrinsics intrinsics;
    // A 0.8 m robot fits inside the ~0.86 m of ground the default camera sees.
    StageConfig stage = [] {
        StageConfig s;
        s.robot.length = 0.8;
        return s;
    }();

    int trial_count = 40;
    std::uint64_t seed = 1;
    double start_offset_max = 1.0;
    std::vector<sim::HeadlandTexture> regimes{sim::HeadlandTexture::Verdant};

    std::filesystem::path output_dir = "out";
    bool write_events = true;
    bool export_replay = false;
    int jobs = 1;  // 0 = hardware concurrency

    /// Throws ConfigError on any inconsistent value.
    void validate() const;
};

struct ConfigKey {
    std::string_view name;
    std::string_view help;
};

/// All accepted keys in file order, with one-line descriptions.
const std::vector<ConfigKey>& config_keys();

/// Applies one assignment. Throws ConfigError for unknown keys or unparsable values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

/// Parses `key = value` lines; `#` starts a comment. Later assignments win.
RunConfig parse_config(std::istream& in, const std::string& origin = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Applies `key=value` override strings in order.
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides);

/// Renders the effective configuration in the file format accepted by parse_config.
std::string to_config_text(const RunConfig& cfg);

}  // namespace rowexit
