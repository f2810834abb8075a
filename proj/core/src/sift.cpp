#include "rowexit/sift.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <tuple>
#include <vector>

namespace rowexit {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr int kImageBorder = 5;
constexpr int kMaxRefineSteps = 5;

constexpr int kOrientationBins = 36;
constexpr double kOrientationSigmaFactor = 1.5;
constexpr double kOrientationRadiusFactor = 3.0;
constexpr double kOrientationPeakRatio = 0.8;

constexpr int kDescWidth = 4;
constexpr int kDescBins = 8;
constexpr double kDescScaleFactor = 3.0;
constexpr float kDescClamp = 0.2f;

double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0) a += kTwoPi;
    if (a >= kTwoPi) a = 0;
    return a;
}

// For angles within one turn of [0, 2pi), as produced by atan2 minus an orientation.
double wrap_near(double a) {
    if (a < 0) a += kTwoPi;
    if (a >= kTwoPi) a -= kTwoPi;
    return a < kTwoPi ? a : 0.0;
}

// Gradient direction in [0, 2pi], branch-free so gather loops vectorize. Absolute
// error is below 1e-5 rad, far finer than any histogram bin.
inline double fast_atan2(double y, double x) {
    const double ax = std::abs(x);
    const double ay = std::abs(y);
    const double hi = std::max(ax, ay);
    const double lo = std::min(ax, ay);
    const double a = hi > 0 ? lo / hi : 0.0;
    const double s = a * a;
    double r = ((((-0.0117212 * s + 0.05265332) * s - 0.11643287) * s + 0.19354346) * s - 0.33262347) * s * a + 0.99997726 * a;
    r = ay > ax ? std::numbers::pi / 2 - r : r;
    r = x < 0 ? std::numbers::pi - r : r;
    return y < 0 ? kTwoPi - r : r;
}

// exp(k * i^2) for i in [-radius, radius], indexed by i + radius.
std::vector<double> gaussian_table(int radius, double k) {
    std::vector<double> t(2 * radius + 1);
    for (int i = -radius; i <= radius; ++i) t[i + radius] = std::exp(k * i * i);
    return t;
}

struct Extremum {
    int x = 0;
    int y = 0;
    int level = 0;
    double dx = 0, dy = 0, ds = 0;  // sub-pixel offsets
    double contrast = 0;
};

bool is_extremum(const Octave& oct, int s, int x, int y, float v) {
    for (int ds = -1; ds <= 1; ++ds) {
        const GrayImage& img = oct.dogs[s + ds];
        for (int yy = y - 1; yy <= y + 1; ++yy) {
            for (int xx = x - 1; xx <= x + 1; ++xx) {
                if (ds == 0 && yy == y && xx == x) continue;
                const float n = img.at(xx, yy);
                if (v > 0 ? n > v : n < v) return false;
            }
        }
    }
    return true;
}

// Solves H * out = rhs for a symmetric 3x3 system; false when singular.
bool solve3(const double h[3][3], const double rhs[3], double out[3]) {
    const double det = h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1]) -
                       h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0]) +
                       h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0]);
    if (std::abs(det) < 1e-30) return false;
    for (int c = 0; c < 3; ++c) {
        double m[3][3];
        for (int r = 0; r < 3; ++r) {
            for (int k = 0; k < 3; ++k) m[r][k] = (k == c) ? rhs[r] : h[r][k];
        }
        const double dc = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                          m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                          m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        out[c] = dc / det;
    }
    return true;
}

// Quadratic refinement of a discrete DoG extremum, followed by the contrast and
// edge-response tests.
std::optional<Extremum> refine(const Octave& oct, const FeatureParams& params, int x, int y, int s) {
    const int S = params.scales_per_octave;
    const int w = oct.width();
    const int h = oct.height();
    double off[3] = {0, 0, 0};
    double grad[3] = {0, 0, 0};
    double dxx = 0, dyy = 0, dxy = 0;
    double centre = 0;
    int step = 0;
    for (; step < kMaxRefineSteps; ++step) {
        const GrayImage& prev = oct.dogs[s - 1];
        const GrayImage& cur = oct.dogs[s];
        const GrayImage& next = oct.dogs[s + 1];
        centre = cur.at(x, y);
        grad[0] = 0.5 * (cur.at(x + 1, y) - cur.at(x - 1, y));
        grad[1] = 0.5 * (cur.at(x, y + 1) - cur.at(x, y - 1));
        grad[2] = 0.5 * (next.at(x, y) - prev.at(x, y));
        dxx = cur.at(x + 1, y) + cur.at(x - 1, y) - 2.0 * centre;
        dyy = cur.at(x, y + 1) + cur.at(x, y - 1) - 2.0 * centre;
        const double dss = next.at(x, y) + prev.at(x, y) - 2.0 * centre;
        dxy = 0.25 * (cur.at(x + 1, y + 1) - cur.at(x - 1, y + 1) - cur.at(x + 1, y - 1) + cur.at(x - 1, y - 1));
        const double dxs = 0.25 * (next.at(x + 1, y) - next.at(x - 1, y) - prev.at(x + 1, y) + prev.at(x - 1, y));
        const double dys = 0.25 * (next.at(x, y + 1) - next.at(x, y - 1) - prev.at(x, y + 1) + prev.at(x, y - 1));
        const double hess[3][3] = {{dxx, dxy, dxs}, {dxy, dyy, dys}, {dxs, dys, dss}};
        const double rhs[3] = {-grad[0], -grad[1], -grad[2]};
        if (!solve3(hess, rhs, off)) return std::nullopt;
        if (std::abs(off[0]) < 0.5 && std::abs(off[1]) < 0.5 && std::abs(off[2]) < 0.5) break;
        if (std::abs(off[0]) > w || std::abs(off[1]) > h || std::abs(off[2]) > S + 2) return std::nullopt;
        x += static_cast<int>(std::lround(off[0]));
        y += static_cast<int>(std::lround(off[1]));
        s += static_cast<int>(std::lround(off[2]));
        if (s < 1 || s > S || x < kImageBorder || x >= w - kImageBorder || y < kImageBorder ||
            y >= h - kImageBorder) {
            return std::nullopt;
        }
    }
    if (step >= kMaxRefineSteps) return std::nullopt;

    const double contrast = centre + 0.5 * (grad[0] * off[0] + grad[1] * off[1] + grad[2] * off[2]);
    if (std::abs(contrast) < params.contrast_threshold) return std::nullopt;

    const double tr = dxx + dyy;
    const double det = dxx * dyy - dxy * dxy;
    const double r = params.edge_ratio_threshold;
    if (det <= 0 || tr * tr * r >= (r + 1) * (r + 1) * det) return std::nullopt;

    return Extremum{x, y, s, off[0], off[1], off[2], contrast};
}

std::vector<double> dominant_orientations(const GrayImage& g, int cx, int cy, double sigma_oct) {
    const double sw = kOrientationSigmaFactor * sigma_oct;
    const int radius = static_cast<int>(std::lround(kOrientationRadiusFactor * sw));
    const auto weight = gaussian_table(radius, -1.0 / (2.0 * sw * sw));
    std::array<double, kOrientationBins> hist{};
    for (int i = -radius; i <= radius; ++i) {
        const int y = cy + i;
        if (y < 1 || y >= g.height() - 1) continue;
        for (int j = -radius; j <= radius; ++j) {
            const int x = cx + j;
            if (x < 1 || x >= g.width() - 1) continue;
            const double dx = g.at(x + 1, y) - g.at(x - 1, y);
            const double dy = g.at(x, y + 1) - g.at(x, y - 1);
            const double mag = std::sqrt(dx * dx + dy * dy);
            if (mag == 0) continue;
            const double ang = wrap_near(fast_atan2(dy, dx));
            int bin = static_cast<int>(std::lround(ang * kOrientationBins / kTwoPi));
            if (bin >= kOrientationBins) bin -= kOrientationBins;
            hist[bin] += weight[i + radius] * weight[j + radius] * mag;
        }
    }
    std::array<double, kOrientationBins> smooth{};
    for (int i = 0; i < kOrientationBins; ++i) {
        auto at = [&](int k) { return hist[(k + kOrientationBins) % kOrientationBins]; };
        smooth[i] = (at(i - 2) + at(i + 2)) * (1.0 / 16) + (at(i - 1) + at(i + 1)) * (4.0 / 16) + at(i) * (6.0 / 16);
    }
    const double peak = *std::max_element(smooth.begin(), smooth.end());
    std::vector<double> out;
    if (peak <= 0) return out;
    for (int i = 0; i < kOrientationBins; ++i) {
        const double l = smooth[(i + kOrientationBins - 1) % kOrientationBins];
        const double r = smooth[(i + 1) % kOrientationBins];
        const double c = smooth[i];
        if (c > l && c > r && c >= kOrientationPeakRatio * peak) {
            const double bin = i + 0.5 * (l - r) / (l - 2.0 * c + r);
            out.push_back(wrap_angle(bin * kTwoPi / kOrientationBins));
        }
    }
    return out;
}

std::optional<Descriptor> describe(const GrayImage& g, double xo, double yo, double sigma_oct,
                                   double orientation, const SampleObserver& observer) {
    constexpr int d = kDescWidth;
    constexpr int n = kDescBins;
    const double hist_width = kDescScaleFactor * sigma_oct;
    const int radius = static_cast<int>(std::lround(hist_width * std::numbers::sqrt2 * (d + 1) * 0.5));
    const int cx = static_cast<int>(std::lround(xo));
    const int cy = static_cast<int>(std::lround(yo));
    if (cx - radius < 1 || cx + radius > g.width() - 2 || cy - radius < 1 || cy + radius > g.height() - 2) {
        return std::nullopt;
    }
    const double cos_t = std::cos(orientation) / hist_width;
    const double sin_t = std::sin(orientation) / hist_width;
    // The Gaussian weight depends on |offset| only, so it separates over rows and columns.
    const auto weight = gaussian_table(radius, -1.0 / (d * d * 0.5 * hist_width * hist_width));
    const double bins_per_rad = n / kTwoPi;

    // (d+2) x (d+2) x n with a one-cell guard band for trilinear spill-over.
    std::array<double, (d + 2) * (d + 2) * n> hist{};
    auto cell = [&](int r, int c, int o) -> double& { return hist[((r + 1) * (d + 2) + (c + 1)) * n + o]; };

    // Gather in-window samples first so the magnitude and angle pass vectorizes.
    thread_local std::vector<double> rbins, cbins, gx, gy, wt;
    rbins.clear();
    cbins.clear();
    gx.clear();
    gy.clear();
    wt.clear();
    for (int i = -radius; i <= radius; ++i) {
        const int y = cy + i;
        for (int j = -radius; j <= radius; ++j) {
            // Offset rotated into the keypoint frame, in histogram-cell units.
            const double u = j * cos_t + i * sin_t;
            const double v = -j * sin_t + i * cos_t;
            const double rbin = v + d / 2.0 - 0.5;
            const double cbin = u + d / 2.0 - 0.5;
            if (rbin <= -1 || rbin >= d || cbin <= -1 || cbin >= d) continue;
            const int x = cx + j;
            if (observer) {
                observer(x - 1, y);
                observer(x + 1, y);
                observer(x, y - 1);
                observer(x, y + 1);
            }
            rbins.push_back(rbin);
            cbins.push_back(cbin);
            gx.push_back(g.at(x + 1, y) - g.at(x - 1, y));
            gy.push_back(g.at(x, y + 1) - g.at(x, y - 1));
            wt.push_back(weight[i + radius] * weight[j + radius]);
        }
    }
    const std::size_t count = rbins.size();
    thread_local std::vector<double> mags, obins;
    mags.resize(count);
    obins.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        mags[k] = std::sqrt(gx[k] * gx[k] + gy[k] * gy[k]) * wt[k];
        obins[k] = fast_atan2(gy[k], gx[k]);
    }

    for (std::size_t k = 0; k < count; ++k) {
        const double mag = mags[k];
        if (mag == 0) continue;
        const double rbin = rbins[k];
        const double cbin = cbins[k];
        const double obin = wrap_near(obins[k] - orientation) * bins_per_rad;

        const int r0 = static_cast<int>(std::floor(rbin));
        const int c0 = static_cast<int>(std::floor(cbin));
        int o0 = static_cast<int>(std::floor(obin));
        const double fr = rbin - r0;
        const double fc = cbin - c0;
        const double fo = obin - o0;
        o0 %= n;
        const int o1 = (o0 + 1) % n;
        for (int dr = 0; dr <= 1; ++dr) {
            const double wr = dr ? fr : 1 - fr;
            for (int dc = 0; dc <= 1; ++dc) {
                const double wc = dc ? fc : 1 - fc;
                const double wrc = mag * wr * wc;
                cell(r0 + dr, c0 + dc, o0) += wrc * (1 - fo);
                cell(r0 + dr, c0 + dc, o1) += wrc * fo;
            }
        }
    }

    std::array<double, kDescriptorSize> raw{};
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            for (int o = 0; o < n; ++o) raw[(r * d + c) * n + o] = cell(r, c, o);
        }
    }
    double norm = 0;
    for (double v : raw) norm += v * v;
    norm = std::sqrt(norm);
    if (!(norm > 0)) return std::nullopt;
    const double clamp = kDescClamp * norm;
    double norm2 = 0;
    for (double& v : raw) {
        v = std::min(v, clamp);
        norm2 += v * v;
    }
    norm2 = std::sqrt(norm2);
    Descriptor out;
    for (int k = 0; k < kDescriptorSize; ++k) {
        out.values[k] = static_cast<float>(std::min(raw[k] / norm2, 1.0));
    }
    return out;
}

struct KeypointLevel {
    const Octave* octave = nullptr;
    int level = 0;
    double sigma_oct = 0;
};

KeypointLevel locate(const ScaleSpace& space, const Keypoint& kp) {
    const int first = space.octaves.empty() ? 0 : space.octaves.front().index;
    const int idx = kp.octave - first;
    if (idx < 0 || idx >= static_cast<int>(space.octaves.size())) {
        fail(ErrorCode::InvalidArgument, "keypoint octave outside the scale space");
    }
    const Octave& oct = space.octaves[idx];
    const double sigma_oct = kp.sigma / oct.step();
    const int S = space.params.scales_per_octave;
    int level = static_cast<int>(std::lround(S * std::log2(sigma_oct / space.params.base_sigma)));
    level = std::clamp(level, 0, static_cast<int>(oct.gaussians.size()) - 1);
    return {&oct, level, sigma_oct};
}

}  // namespace

std::optional<Descriptor> try_compute_descriptor(const ScaleSpace& space, const Keypoint& kp,
                                                 const SampleObserver& observer) {
    const KeypointLevel loc = locate(space, kp);
    const double step = loc.octave->step();
    return describe(loc.octave->gaussians[loc.level], kp.x / step, kp.y / step, loc.sigma_oct,
                    kp.orientation, observer);
}

Descriptor compute_descriptor(const ScaleSpace& space, const Keypoint& kp) {
    auto d = try_compute_descriptor(space, kp);
    if (!d) {
        fail(ErrorCode::WindowOutOfBounds, "descriptor window leaves the image or has no gradient");
    }
    return *d;
}

std::vector<Feature> detect_and_describe(const GrayImage& img, const FeatureParams& params) {
    return detect_and_describe(build_scale_space(img, params));
}

std::vector<Feature> detect_and_describe(const ScaleSpace& space) {
    const FeatureParams& params = space.params;
    const int S = params.scales_per_octave;
    const float prefilter = static_cast<float>(0.5 * params.contrast_threshold);
    std::vector<Feature> out;

    for (const Octave& oct : space.octaves) {
        const int w = oct.width();
        const int h = oct.height();
        const double step = oct.step();
        for (int s = 1; s <= S; ++s) {
            const GrayImage& dog = oct.dogs[s];
            for (int y = kImageBorder; y < h - kImageBorder; ++y) {
                for (int x = kImageBorder; x < w - kImageBorder; ++x) {
                    const float v = dog.at(x, y);
                    if (std::abs(v) <= prefilter || !is_extremum(oct, s, x, y, v)) continue;
                    const auto ext = refine(oct, params, x, y, s);
                    if (!ext) continue;

                    const double level = ext->level + ext->ds;
                    const double sigma_oct = params.base_sigma * std::pow(2.0, level / S);
                    Keypoint kp;
                    kp.x = (ext->x + ext->dx) * step;
                    kp.y = (ext->y + ext->dy) * step;
                    kp.sigma = sigma_oct * step;
                    kp.octave = oct.index;
                    kp.response = std::abs(ext->contrast);

                    const GrayImage& g = oct.gaussians[ext->level];
                    for (double ori : dominant_orientations(g, ext->x, ext->y, sigma_oct)) {
                        kp.orientation = ori;
                        // Same path as try_compute_descriptor, so the two agree bit for bit.
                        if (auto desc = try_compute_descriptor(space, kp)) {
                            out.push_back({kp, *desc});
                        }
                    }
                }
            }
        }
    }

    std::sort(out.begin(), out.end(), [](const Feature& a, const Feature& b) {
        const Keypoint& p = a.keypoint;
        const Keypoint& q = b.keypoint;
        return std::tie(p.y, p.x, p.sigma, p.orientation) < std::tie(q.y, q.x, q.sigma, q.orientation);
    });
    return out;
}

std::vector<Descriptor> descriptors_of(const std::vector<Feature>& features) {
    std::vector<Descriptor> out;
    out.reserve(features.size());
    for (const Feature& f : features) out.push_back(f.descriptor);
    return out;
}

void write_keypoints_csv(std::ostream& out, const std::vector<Feature>& features) {
    out << "x,y,sigma,orientation,response\n";
    const auto old = out.precision(9);
    for (const Feature& f : features) {
        const Keypoint& k = f.keypoint;
        out << k.x << ',' << k.y << ',' << k.sigma << ',' << k.orientation << ',' << k.response << '\n';
    }
    out.precision(old);
}

}  // namespace rowexit
