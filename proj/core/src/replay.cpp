#include "rowexit/replay.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "rowexit/error.hpp"
#include "rowexit/image_io.hpp"

namespace rowexit {

std::string to_json_line(const ManifestRecord& r) {
    nlohmann::ordered_json j;
    j["frame_id"] = r.frame_id;
    j["rgb_path"] = r.rgb_path;
    j["depth_path"] = r.depth_path;
    if (r.odom_position_m) j["odom_position_m"] = *r.odom_position_m;
    if (r.eor_trigger) j["eor_trigger"] = true;
    if (r.eor_position_m) j["eor_position_m"] = *r.eor_position_m;
    if (r.y_eor) j["y_eor"] = *r.y_eor;
    return j.dump();
}

ManifestRecord parse_manifest_line(const std::string& line, int lineno) {
    const std::string where = "manifest line " + std::to_string(lineno) + ": ";
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ManifestError, where + e.what());
    }
    if (!j.is_object()) fail(ErrorCode::ManifestError, where + "record is not an object");
    ManifestRecord r;
    try {
        r.frame_id = j.at("frame_id").get<int>();
        r.rgb_path = j.at("rgb_path").get<std::string>();
        r.depth_path = j.at("depth_path").get<std::string>();
        if (auto it = j.find("odom_position_m"); it != j.end() && !it->is_null()) r.odom_position_m = it->get<double>();
        if (auto it = j.find("eor_trigger"); it != j.end() && !it->is_null()) r.eor_trigger = it->get<bool>();
        if (auto it = j.find("eor_position_m"); it != j.end() && !it->is_null()) r.eor_position_m = it->get<double>();
        if (auto it = j.find("y_eor"); it != j.end() && !it->is_null()) r.y_eor = it->get<int>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ManifestError, where + e.what());
    }
    return r;
}

std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::MissingFile, "cannot open manifest " + path.string());
    std::vector<ManifestRecord> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(parse_manifest_line(line, lineno));
    }
    return out;
}

TrialResult replay_manifest(const std::filesystem::path& manifest, const StageConfig& cfg,
                            const CameraIntrinsics& intr, EventSink sink) {
    const auto records = read_manifest(manifest);
    const auto trigger = std::find_if(records.begin(), records.end(), [](const auto& r) { return r.eor_trigger; });
    if (trigger == records.end()) {
        fail(ErrorCode::ManifestError, "no record carries eor_trigger; the pipeline cannot start");
    }
    std::optional<double> eor_position = trigger->eor_position_m;
    if (!eor_position) {
        const auto any = std::find_if(records.begin(), records.end(), [](const auto& r) { return r.eor_position_m; });
        if (any != records.end()) eor_position = any->eor_position_m;
    }

    const auto base = manifest.parent_path();
    TrialDriver driver(cfg, intr, eor_position, std::move(sink));
    for (auto it = trigger; it != records.end() && !driver.finished(); ++it) {
        const auto [rgb, depth] = load_rgb_depth_pair(base / it->rgb_path, base / it->depth_path);
        if (rgb.width() != intr.width || rgb.height() != intr.height) {
            fail(ErrorCode::DimensionMismatch, "frame " + std::to_string(it->frame_id) + " does not match the intrinsics");
        }
        driver.feed({rgb, depth, it->odom_position_m, it == trigger, it->y_eor.value_or(intr.height / 2)});
    }
    TrialResult result = driver.result();
    if (!driver.finished()) result.abort = "SequenceExhausted";
    return result;
}

ReplayExporter::ReplayExporter(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create " + dir_.string() + ": " + ec.message());
    manifest_path_ = dir_ / "manifest.jsonl";
    manifest_.open(manifest_path_, std::ios::trunc);
    if (!manifest_) fail(ErrorCode::IoError, "cannot write " + manifest_path_.string());
}

void ReplayExporter::operator()(const sim::FrameRecord& f) {
    char rgb_name[32], depth_name[32];
    std::snprintf(rgb_name, sizeof rgb_name, "frame_%05d_rgb.png", f.frame_id);
    std::snprintf(depth_name, sizeof depth_name, "frame_%05d_depth.png", f.frame_id);
    save_rgb_png(dir_ / rgb_name, f.rgb);
    save_depth_png(dir_ / depth_name, f.depth);
    ManifestRecord r{f.frame_id, rgb_name, depth_name, f.front_position, f.eor_trigger, std::nullopt, std::nullopt};
    if (f.eor_trigger) {
        r.eor_position_m = f.eor_position;
        r.y_eor = f.y_eor;
    }
    manifest_ << to_json_line(r) << '\n';
    manifest_.flush();
    if (!manifest_) fail(ErrorCode::IoError, "write failed on " + manifest_path_.string());
}

}  // namespace rowexit
