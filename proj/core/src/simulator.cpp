#include "rowexit/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace rowexit::sim {
namespace {

// Procedural texture scales (metres per lattice cell) for the two noise octaves.
constexpr double kCoarseCell = 0.012;
constexpr double kFineCell = 0.005;
constexpr double kCoarseWeight = 0.65;
// Summed value noise clusters around 0.5; this gain spreads it back over [0, 1].
constexpr double kNoiseGain = 3.0;

struct Rgb {
    double r, g, b;
};

constexpr Rgb kSky{170, 200, 230};
constexpr Rgb kRowSoil{112, 82, 56};
constexpr Rgb kHeadlandSoil{124, 94, 64};
constexpr Rgb kHeadlandGrass{72, 122, 46};
constexpr Rgb kHedge{44, 74, 38};
constexpr Rgb kLeaf{64, 142, 52};
constexpr double kHedgeContrast = 0.5;
constexpr double kLeafContrast = 0.5;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double lattice(std::int64_t ix, std::int64_t iy, std::uint64_t seed) {
    const std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(ix) * 0x9E3779B97F4A7C15ull ^
                                                         static_cast<std::uint64_t>(iy) * 0xC2B2AE3D27D4EB4Full));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double value_noise(double x, double y, std::uint64_t seed) {
    const double fx0 = std::floor(x);
    const double fy0 = std::floor(y);
    const auto ix = static_cast<std::int64_t>(fx0);
    const auto iy = static_cast<std::int64_t>(fy0);
    const double tx = x - fx0;
    const double ty = y - fy0;
    const double sx = tx * tx * (3 - 2 * tx);
    const double sy = ty * ty * (3 - 2 * ty);
    const double a = lattice(ix, iy, seed);
    const double b = lattice(ix + 1, iy, seed);
    const double c = lattice(ix, iy + 1, seed);
    const double d = lattice(ix + 1, iy + 1, seed);
    return (a + (b - a) * sx) * (1 - sy) + (c + (d - c) * sx) * sy;
}

double texture(double u, double v, std::uint64_t seed) {
    const double t = kCoarseWeight * value_noise(u / kCoarseCell, v / kCoarseCell, seed) +
           (1 - kCoarseWeight) * value_noise(u / kFineCell, v / kFineCell, seed ^ 0xA5A5A5A5ull);
    return std::clamp(0.5 + kNoiseGain * (t - 0.5), 0.0, 1.0);
}

Rgb shade(Rgb base, double contrast, double t) {
    const double gain = 1.0 + contrast * (2.0 * t - 1.0);
    return {base.r * gain, base.g * gain, base.b * gain};
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0))); }

struct Vec3 {
    double x, y, z;
};

struct Plant {
    double x, y;
    std::uint64_t seed;
};

struct Hit {
    double t = std::numeric_limits<double>::infinity();
    SurfaceKind kind = SurfaceKind::Sky;
    double u = 0, v = 0;  // texture coordinates
    std::uint64_t seed = 0;
};

bool inside_leaf(double lateral, double z, double half_width, double height) {
    const double a = lateral / half_width;
    const double b = (z - 0.5 * height) / (0.5 * height);
    return a * a + b * b <= 1.0;
}

struct Scene {
    const WorldConfig& world;
    Vec3 cam;
    double boundary_x;
    double half_w;
    std::vector<Plant> plants;
    std::uint64_t row_seed, head_seed, hedge_seed;
    Rgb head_base;
    double head_contrast;

    Hit trace(const Vec3& dir) const {
        Hit hit;
        if (dir.z < 0) {
            const double t = -cam.z / dir.z;
            const double gx = cam.x + t * dir.x;
            hit.t = t;
            hit.u = gx;
            hit.v = cam.y + t * dir.y;
            if (gx < world.row_length) {
                hit.kind = SurfaceKind::RowGround;
                hit.seed = row_seed;
            } else if (gx < boundary_x) {
                hit.kind = SurfaceKind::HeadlandGround;
                hit.seed = head_seed;
            } else {
                hit.kind = SurfaceKind::Boundary;
                hit.seed = hedge_seed;
            }
        }
        if (dir.x > 0 && cam.x < boundary_x) {
            const double t = (boundary_x - cam.x) / dir.x;
            const double z = cam.z + t * dir.z;
            if (t < hit.t && z >= 0 && z <= world.boundary_height) {
                hit = {t, SurfaceKind::Boundary, cam.y + t * dir.y, z, hedge_seed};
            }
        }
        for (const Plant& p : plants) {
            if (dir.x != 0) {
                const double t = (p.x - cam.x) / dir.x;
                if (t > 0 && t < hit.t) {
                    const double lat = cam.y + t * dir.y - p.y;
                    const double z = cam.z + t * dir.z;
                    if (z >= 0 && std::abs(lat) <= half_w && inside_leaf(lat, z, half_w, world.plant_height)) {
                        hit = {t, SurfaceKind::Plant, lat, z, p.seed};
                    }
                }
            }
            if (dir.y != 0) {
                const double t = (p.y - cam.y) / dir.y;
                if (t > 0 && t < hit.t) {
                    const double lon = cam.x + t * dir.x - p.x;
                    const double z = cam.z + t * dir.z;
                    if (z >= 0 && std::abs(lon) <= half_w && inside_leaf(lon, z, half_w, world.plant_height)) {
                        hit = {t, SurfaceKind::Plant, lon, z, p.seed ^ 0x5555ull};
                    }
                }
            }
        }
        return hit;
    }

    Rgb colour(const Hit& hit) const {
        switch (hit.kind) {
            case SurfaceKind::Sky: return kSky;
            case SurfaceKind::RowGround:
                return shade(kRowSoil, world.row_ground_contrast, texture(hit.u, hit.v, hit.seed));
            case SurfaceKind::HeadlandGround:
                return shade(head_base, head_contrast, texture(hit.u, hit.v, hit.seed));
            case SurfaceKind::Boundary: return shade(kHedge, kHedgeContrast, texture(hit.u, hit.v, hit.seed));
            case SurfaceKind::Plant: return shade(kLeaf, kLeafContrast, texture(hit.u, hit.v, hit.seed));
        }
        return kSky;
    }
};

template <bool Labeled>
void render_impl(const WorldConfig& world, const CameraPose& pose, const CameraIntrinsics& intr,
                 std::uint16_t max_range_mm, RgbImage& rgb, DepthImage& depth, Image<std::uint8_t>* surface) {
    world.validate();
    pose.validate();
    intr.validate();

    const double f = intr.focal_y();
    const double cx = intr.cx();
    const double cy = intr.cy();
    const double sp = std::sin(pose.pitch);
    const double cp = std::cos(pose.pitch);
    const Vec3 fwd{cp, 0, -sp};
    const Vec3 down{-sp, 0, -cp};  // image +y; image +x is world -y

    Scene scene{world,
                {pose.position, 0, pose.height},
                world.row_length + world.headland_depth,
                0.5 * world.plant_width,
                {},
                splitmix64(world.texture_seed ^ 0x1111ull),
                splitmix64(world.texture_seed ^ 0x2222ull),
                splitmix64(world.texture_seed ^ 0x3333ull),
                world.headland_texture == HeadlandTexture::Soil ? kHeadlandSoil : kHeadlandGrass,
                world.texture_contrast()};

    // A plant can only be hit by a ray that reaches the ground beyond it, so plants
    // farther than the top row's ground distance (or the sensor range) are invisible.
    const double top_angle = pose.pitch - intr.row_angle(-0.5);
    double reach = max_range_mm / 1000.0;
    if (top_angle > 0) reach = std::min(reach, pose.height / std::tan(top_angle));
    for (int i = 0;; ++i) {
        const double px = (i + 0.5) * world.plant_spacing;
        if (px >= world.row_length) break;
        if (px + scene.half_w < pose.position - 1.0 || px - scene.half_w > pose.position + reach) continue;
        for (int side = -1; side <= 1; side += 2) {
            scene.plants.push_back({px, side * world.row_half_width,
                                    splitmix64(world.texture_seed ^ (static_cast<std::uint64_t>(i) << 1 | (side > 0)))});
        }
    }

    const int ss = world.supersample;
    const double inv_samples = 1.0 / (ss * ss);
    auto ray = [&](double u, double v) {
        const double du = u - cx;
        const double dv = v - cy;
        return Vec3{f * fwd.x + dv * down.x, -du, f * fwd.z + dv * down.z};
    };

    for (int py = 0; py < intr.height; ++py) {
        for (int px = 0; px < intr.width; ++px) {
            const Vec3 centre = ray(px, py);
            const Hit hit = scene.trace(centre);

            Rgb sum{0, 0, 0};
            if (ss == 1) {
                sum = scene.colour(hit);
            } else {
                for (int sy = 0; sy < ss; ++sy) {
                    for (int sx = 0; sx < ss; ++sx) {
                        const Rgb c = scene.colour(scene.trace(ray(px + (sx + 0.5) / ss - 0.5, py + (sy + 0.5) / ss - 0.5)));
                        sum = {sum.r + c.r, sum.g + c.g, sum.b + c.b};
                    }
                }
                sum = {sum.r * inv_samples, sum.g * inv_samples, sum.b * inv_samples};
            }
            std::uint8_t* out = &rgb.at(px, py, 0);
            out[0] = to_byte(sum.r);
            out[1] = to_byte(sum.g);
            out[2] = to_byte(sum.b);

            std::uint16_t mm = 0;
            if (hit.kind != SurfaceKind::Sky) {
                const double norm = std::sqrt(centre.x * centre.x + centre.y * centre.y + centre.z * centre.z);
                const double dist_mm = hit.t * norm * 1000.0;
                if (dist_mm <= max_range_mm) mm = static_cast<std::uint16_t>(std::lround(dist_mm));
            }
            depth.at(px, py) = mm;
            if constexpr (Labeled) surface->at(px, py) = static_cast<std::uint8_t>(hit.kind);
        }
    }
}

}  // namespace

std::string_view to_string(HeadlandTexture t) { return t == HeadlandTexture::Soil ? "soil" : "verdant"; }

std::optional<HeadlandTexture> parse_headland_texture(std::string_view s) {
    if (s == "soil") return HeadlandTexture::Soil;
    if (s == "verdant") return HeadlandTexture::Verdant;
    return std::nullopt;
}

void WorldConfig::validate() const {
    if (!(row_length > 0 && plant_spacing > 0 && plant_height > 0 && plant_width > 0 && row_half_width > 0 &&
          headland_depth > 0 && boundary_height > 0)) {
        fail(ErrorCode::InvalidArgument, "world lengths must be positive");
    }
    if (!(soil_contrast >= 0 && verdant_contrast >= 0 && row_ground_contrast >= 0)) {
        fail(ErrorCode::InvalidArgument, "texture contrasts must be non-negative");
    }
    if (supersample < 1 || supersample > 8) fail(ErrorCode::InvalidArgument, "supersample must lie in [1, 8]");
    if (!(soil_contrast < verdant_contrast)) {
        fail(ErrorCode::InvalidArgument, "soil contrast must be lower than verdant contrast");
    }
}

void CameraPose::validate() const {
    if (!(height > 0)) fail(ErrorCode::InvalidArgument, "camera height must be > 0");
    if (!(pitch > 0 && pitch < std::numbers::pi / 2)) {
        fail(ErrorCode::InvalidArgument, "camera pitch must lie in (0, pi/2)");
    }
}

RenderedFrame render_frame(const WorldConfig& world, const CameraPose& pose, const CameraIntrinsics& intr,
                           std::uint16_t max_range_mm) {
    RenderedFrame f{RgbImage(intr.width, intr.height), DepthImage(intr.width, intr.height)};
    render_impl<false>(world, pose, intr, max_range_mm, f.rgb, f.depth, nullptr);
    return f;
}

LabeledFrame render_labeled(const WorldConfig& world, const CameraPose& pose, const CameraIntrinsics& intr,
                            std::uint16_t max_range_mm) {
    LabeledFrame f{RgbImage(intr.width, intr.height), DepthImage(intr.width, intr.height),
                   Image<std::uint8_t>(intr.width, intr.height)};
    render_impl<true>(world, pose, intr, max_range_mm, f.rgb, f.depth, &f.surface);
    return f;
}

double ground_distance_at_row(const CameraPose& pose, const CameraIntrinsics& intr, double y) {
    const double angle = pose.pitch - intr.row_angle(y);
    if (angle <= 0) return std::numeric_limits<double>::infinity();
    return pose.height / std::tan(angle);
}

double front_offset(const CameraPose& pose, const CameraIntrinsics& intr) {
    const double angle = pose.pitch - intr.row_angle(intr.height - 1);
    if (angle >= std::numbers::pi / 2) return 0.0;
    return pose.height / std::tan(angle);
}

}  // namespace rowexit::sim
