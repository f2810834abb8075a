#include "rowexit/run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "rowexit/error.hpp"

namespace rowexit {
namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
    fail(ErrorCode::ConfigError,
         "invalid value '" + std::string(value) + "' for key '" + std::string(key) + "': expected " +
             std::string(expected));
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        bad_value(key, value, std::is_floating_point_v<T> ? "a number" : "an integer");
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    bad_value(key, value, "true or false");
}

std::string fmt(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string regimes_text(const std::vector<sim::HeadlandTexture>& regimes) {
    std::string out;
    for (const auto r : regimes) {
        if (!out.empty()) out += ',';
        out += sim::to_string(r);
    }
    return out;
}

struct Entry {
    ConfigKey key;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define ROWEXIT_DOUBLE(NAME, HELP, EXPR)                                                            \
    Entry {                                                                                         \
        {NAME, HELP}, [](RunConfig& c, std::string_view v) { c.EXPR = parse_number<double>(NAME, v); }, \
            [](const RunConfig& c) { return fmt(c.EXPR); }                                          \
    }
#define ROWEXIT_INT(NAME, HELP, TYPE, EXPR)                                                       \
    Entry {                                                                                       \
        {NAME, HELP}, [](RunConfig& c, std::string_view v) { c.EXPR = parse_number<TYPE>(NAME, v); }, \
            [](const RunConfig& c) { return std::to_string(c.EXPR); }                             \
    }
#define ROWEXIT_BOOL(NAME, HELP, EXPR)                                                     \
    Entry {                                                                                \
        {NAME, HELP}, [](RunConfig& c, std::string_view v) { c.EXPR = parse_bool(NAME, v); }, \
            [](const RunConfig& c) { return std::string(c.EXPR ? "true" : "false"); }      \
    }

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = {
        ROWEXIT_DOUBLE("world.row_length", "crop row length in metres", world.row_length),
        ROWEXIT_DOUBLE("world.plant_spacing", "distance between plants along a row, metres", world.plant_spacing),
        ROWEXIT_DOUBLE("world.plant_height", "plant billboard height, metres", world.plant_height),
        ROWEXIT_DOUBLE("world.plant_width", "plant billboard width, metres", world.plant_width),
        ROWEXIT_DOUBLE("world.row_half_width", "lateral offset of each plant row from the track, metres",
                       world.row_half_width),
        ROWEXIT_DOUBLE("world.headland_depth", "headland strip depth beyond the row end, metres",
                       world.headland_depth),
        ROWEXIT_DOUBLE("world.boundary_height", "height of the hedge closing the headland, metres",
                       world.boundary_height),
        Entry{{"world.headland_texture", "headland regime when trials.regimes is unset: soil or verdant"},
              [](RunConfig& c, std::string_view v) {
                  const auto t = sim::parse_headland_texture(v);
                  if (!t) bad_value("world.headland_texture", v, "soil or verdant");
                  c.world.headland_texture = *t;
              },
              [](const RunConfig& c) { return std::string(sim::to_string(c.world.headland_texture)); }},
        ROWEXIT_INT("world.texture_seed", "base seed of the procedural textures", std::uint64_t,
                    world.texture_seed),
        ROWEXIT_DOUBLE("world.soil_contrast", "texture contrast of the soil headland", world.soil_contrast),
        ROWEXIT_DOUBLE("world.verdant_contrast", "texture contrast of the verdant headland",
                       world.verdant_contrast),
        ROWEXIT_DOUBLE("world.row_ground_contrast", "texture contrast of the ground inside the row",
                       world.row_ground_contrast),
        ROWEXIT_INT("world.supersample", "anti-aliasing samples per pixel along each axis", int,
                    world.supersample),
        ROWEXIT_DOUBLE("camera.height", "camera height above ground, metres", camera.height),
        Entry{{"camera.pitch_deg", "camera pitch below horizontal, degrees"},
              [](RunConfig& c, std::string_view v) {
                  c.camera.pitch = deg_to_rad(parse_number<double>("camera.pitch_deg", v));
              },
              [](const RunConfig& c) { return fmt(c.camera.pitch * 180.0 / 3.14159265358979323846); }},
        Entry{{"camera.vfov_deg", "vertical field of view, degrees"},
              [](RunConfig& c, std::string_view v) {
                  c.intrinsics.vertical_fov = deg_to_rad(parse_number<double>("camera.vfov_deg", v));
              },
              [](const RunConfig& c) { return fmt(c.intrinsics.vertical_fov * 180.0 / 3.14159265358979323846); }},
        ROWEXIT_INT("camera.image_width", "image width, pixels", int, intrinsics.width),
        ROWEXIT_INT("camera.image_height", "image height, pixels", int, intrinsics.height),
        ROWEXIT_INT("camera.max_range_mm", "depth sensor range; farther samples read 0", std::uint16_t,
                    stage.max_range_mm),
        ROWEXIT_DOUBLE("robot.length", "robot body length l, metres", stage.robot.length),
        ROWEXIT_DOUBLE("robot.scale_m", "stage-2 travel as a multiple m of the robot length", stage.robot.scale),
        ROWEXIT_DOUBLE("stage.linear_velocity", "forward speed, m/s", stage.linear_velocity),
        ROWEXIT_DOUBLE("stage.frame_rate", "processed frames per second", stage.frame_rate),
        ROWEXIT_INT("stage.max_frames", "frames allowed per stage before MaxFramesExceeded", int,
                    stage.max_frames),
        ROWEXIT_INT("stage.halt_latency_frames", "frames the robot keeps moving after a halt decision", int,
                    stage.halt_latency_frames),
        ROWEXIT_DOUBLE("matcher.ratio_threshold", "ratio-test threshold", stage.matcher.ratio_threshold),
        ROWEXIT_INT("matcher.sim_threshold", "halt when the score falls strictly below this", int,
                    stage.matcher.sim_threshold),
        ROWEXIT_INT("features.scales_per_octave", "DoG scales per octave", int, stage.features.scales_per_octave),
        ROWEXIT_DOUBLE("features.base_sigma", "base blur of the scale space", stage.features.base_sigma),
        ROWEXIT_DOUBLE("features.contrast_threshold", "minimum |DoG| response of a keypoint",
                       stage.features.contrast_threshold),
        ROWEXIT_DOUBLE("features.edge_ratio_threshold", "principal-curvature ratio limit",
                       stage.features.edge_ratio_threshold),
        ROWEXIT_INT("features.max_octaves", "octave cap, 0 = as many as the image allows", int,
                    stage.features.max_octaves),
        ROWEXIT_BOOL("features.upsample", "double the input before the first octave", stage.features.upsample),
        ROWEXIT_INT("trials.count", "trials per regime", int, trial_count),
        ROWEXIT_INT("trials.seed", "master seed; trial i uses seed + i", std::uint64_t, seed),
        ROWEXIT_DOUBLE("trials.start_offset_max", "start distance before the trigger pose is U[0, this), metres",
                       start_offset_max),
        Entry{{"trials.regimes", "comma-separated headland regimes to run: soil, verdant"},
              [](RunConfig& c, std::string_view v) {
                  std::vector<sim::HeadlandTexture> out;
                  std::size_t pos = 0;
                  while (pos <= v.size()) {
                      const auto comma = v.find(',', pos);
                      const auto item = trim(v.substr(pos, comma == std::string_view::npos ? v.npos : comma - pos));
                      const auto t = sim::parse_headland_texture(item);
                      if (!t) bad_value("trials.regimes", v, "a comma-separated list of soil and verdant");
                      out.push_back(*t);
                      if (comma == std::string_view::npos) break;
                      pos = comma + 1;
                  }
                  c.regimes = std::move(out);
              },
              [](const RunConfig& c) { return regimes_text(c.regimes); }},
        Entry{{"output.dir", "directory receiving CSV, event logs and replay exports"},
              [](RunConfig& c, std::string_view v) { c.output_dir = std::string(v); },
              [](const RunConfig& c) { return c.output_dir.string(); }},
        ROWEXIT_BOOL("output.events", "write one JSON-lines event log per trial", write_events),
        ROWEXIT_BOOL("output.export_replay", "write frames and a replay manifest per trial", export_replay),
        ROWEXIT_INT("run.jobs", "worker threads, 0 = hardware concurrency", int, jobs),
    };
    return table;
}

#undef ROWEXIT_DOUBLE
#undef ROWEXIT_INT
#undef ROWEXIT_BOOL

}  // namespace

void RunConfig::validate() const {
    try {
        world.validate();
        camera.validate();
        intrinsics.validate();
        stage.validate();
    } catch (const Error& e) {
        fail(ErrorCode::ConfigError, e.what());
    }
    if (trial_count < 1) fail(ErrorCode::ConfigError, "trials.count must be >= 1");
    if (!(start_offset_max > 0)) fail(ErrorCode::ConfigError, "trials.start_offset_max must be > 0");
    if (regimes.empty()) fail(ErrorCode::ConfigError, "trials.regimes must name at least one regime");
    if (jobs < 0) fail(ErrorCode::ConfigError, "run.jobs must be >= 0");
    if (output_dir.empty()) fail(ErrorCode::ConfigError, "output.dir must not be empty");
}

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> out;
        for (const auto& e : entries()) out.push_back(e.key);
        return out;
    }();
    return keys;
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
    for (const auto& e : entries()) {
        if (e.key.name == key) {
            e.set(cfg, value);
            // An explicit headland texture selects the single regime to run.
            if (key == "world.headland_texture") cfg.regimes = {cfg.world.headland_texture};
            return;
        }
    }
    fail(ErrorCode::ConfigError, "unknown config key '" + std::string(key) + "'");
}

RunConfig parse_config(std::istream& in, const std::string& origin) {
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s = line;
        if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) {
            fail(ErrorCode::ConfigError, origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        const auto key = trim(s.substr(0, eq));
        const auto value = trim(s.substr(eq + 1));
        if (key.empty()) fail(ErrorCode::ConfigError, origin + ":" + std::to_string(lineno) + ": empty key");
        apply_setting(cfg, key, value);
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::MissingFile, "cannot open config " + path.string());
    return parse_config(in, path.string());
}

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) {
        const std::string_view s = o;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) fail(ErrorCode::ConfigError, "override '" + o + "' is not key=value");
        apply_setting(cfg, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
}

std::string to_config_text(const RunConfig& cfg) {
    std::ostringstream out;
    for (const auto& e : entries()) {
        if (e.key.name == "world.headland_texture") continue;  // implied by trials.regimes
        out << e.key.name << " = " << e.get(cfg) << '\n';
    }
    return out.str();
}

}  // namespace rowexit
