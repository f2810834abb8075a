#include "rowexit/image_io.hpp"

#include <png.h>

#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace rowexit {
namespace {

namespace fs = std::filesystem;

struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_for_read(const fs::path& path) {
    if (!fs::exists(path)) {
        fail(ErrorCode::MissingFile, path.string());
    }
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) {
        fail(ErrorCode::IoError, "cannot open " + path.string());
    }
    return f;
}

/// Decoded PNG in host byte order, after palette/low-bit expansion and alpha strip.
struct RawPng {
    int width = 0;
    int height = 0;
    int channels = 0;   // 1 or 3
    int bit_depth = 0;  // 8 or 16
    std::vector<std::uint8_t> bytes;
};

struct ErrorSlot {
    char message[256] = {};
};

void on_png_error(png_structp png, png_const_charp msg) {
    auto* slot = static_cast<ErrorSlot*>(png_get_error_ptr(png));
    std::snprintf(slot->message, sizeof(slot->message), "%s", msg);
    png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

bool has_png_signature(std::FILE* f) {
    std::array<png_byte, 8> sig{};
    const std::size_t n = std::fread(sig.data(), 1, sig.size(), f);
    std::rewind(f);
    return n == sig.size() && png_sig_cmp(sig.data(), 0, sig.size()) == 0;
}

RawPng read_png(std::FILE* f, const fs::path& path) {
    ErrorSlot slot;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &slot, on_png_error, on_png_warning);
    if (!png) {
        fail(ErrorCode::DecodeError, "libpng init failed");
    }
    png_infop info = png_create_info_struct(png);
    RawPng raw;
    std::vector<png_bytep> rows;
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        fail(ErrorCode::DecodeError, path.string() + ": " + slot.message);
    }
    png_init_io(png, f);
    png_read_info(png, info);

    const png_byte color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
    if (depth == 16 && std::endian::native == std::endian::little) png_set_swap(png);
    if (png_get_interlace_type(png, info) != PNG_INTERLACE_NONE) png_set_interlace_handling(png);
    png_read_update_info(png, info);

    raw.width = static_cast<int>(png_get_image_width(png, info));
    raw.height = static_cast<int>(png_get_image_height(png, info));
    raw.channels = png_get_channels(png, info);
    raw.bit_depth = png_get_bit_depth(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    raw.bytes.resize(stride * raw.height);
    rows.resize(raw.height);
    for (int y = 0; y < raw.height; ++y) rows[y] = raw.bytes.data() + stride * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return raw;
}

void write_png(const fs::path& path, int width, int height, int channels, int bit_depth,
               const std::uint8_t* data) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) {
        fail(ErrorCode::IoError, "cannot write " + path.string());
    }
    ErrorSlot slot;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &slot, on_png_error, on_png_warning);
    if (!png) {
        fail(ErrorCode::IoError, "libpng init failed");
    }
    png_infop info = png_create_info_struct(png);
    const std::size_t stride = static_cast<std::size_t>(width) * channels * (bit_depth / 8);
    std::vector<png_bytep> rows(height);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, info ? &info : nullptr);
        fail(ErrorCode::IoError, path.string() + ": " + slot.message);
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, width, height, bit_depth,
                 channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16 && std::endian::native == std::endian::little) png_set_swap(png);
    for (int y = 0; y < height; ++y) {
        rows[y] = const_cast<png_bytep>(data + stride * y);
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// --- PGM ---------------------------------------------------------------

int read_pgm_int(std::istream& in) {
    int c = in.peek();
    while (in && (std::isspace(c) || c == '#')) {
        if (c == '#') {
            std::string skip;
            std::getline(in, skip);
        } else {
            in.get();
        }
        c = in.peek();
    }
    int v = 0;
    if (!(in >> v)) {
        fail(ErrorCode::DecodeError, "malformed PGM header");
    }
    return v;
}

GrayImage read_pgm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::IoError, "cannot open " + path.string());
    }
    char magic[2] = {};
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '5') {
        fail(ErrorCode::DecodeError, path.string() + ": not a binary PGM");
    }
    const int w = read_pgm_int(in);
    const int h = read_pgm_int(in);
    const int maxval = read_pgm_int(in);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) {
        fail(ErrorCode::DecodeError, path.string() + ": bad PGM dimensions");
    }
    in.get();  // single whitespace before raster
    const int bytes_per = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h * bytes_per);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
        fail(ErrorCode::DecodeError, path.string() + ": truncated PGM raster");
    }
    GrayImage out(w, h);
    auto px = out.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        const int v = bytes_per == 2 ? (buf[2 * i] << 8) | buf[2 * i + 1] : buf[i];
        px[i] = static_cast<float>(v) / static_cast<float>(maxval);
    }
    return out;
}

std::uint8_t quantize(float v) {
    const float c = v < 0.f ? 0.f : (v > 1.f ? 1.f : v);
    return static_cast<std::uint8_t>(std::lround(c * 255.f));
}

}  // namespace

RgbImage load_rgb_png(const fs::path& path) {
    FilePtr f = open_for_read(path);
    if (!has_png_signature(f.get())) {
        fail(ErrorCode::DecodeError, path.string() + ": not a PNG file");
    }
    RawPng raw = read_png(f.get(), path);
    if (raw.bit_depth != 8) {
        fail(ErrorCode::DecodeError, path.string() + ": expected 8-bit colour PNG");
    }
    RgbImage out(raw.width, raw.height);
    auto dst = out.pixels();
    if (raw.channels == 3) {
        std::memcpy(dst.data(), raw.bytes.data(), dst.size());
    } else {
        for (std::size_t i = 0; i < raw.bytes.size(); ++i) {
            dst[3 * i] = dst[3 * i + 1] = dst[3 * i + 2] = raw.bytes[i];
        }
    }
    return out;
}

DepthImage load_depth_png(const fs::path& path) {
    FilePtr f = open_for_read(path);
    if (!has_png_signature(f.get())) {
        fail(ErrorCode::DecodeError, path.string() + ": not a PNG file");
    }
    RawPng raw = read_png(f.get(), path);
    if (raw.bit_depth != 16 || raw.channels != 1) {
        fail(ErrorCode::DecodeError, path.string() + ": expected 16-bit single-channel PNG");
    }
    DepthImage out(raw.width, raw.height);
    std::memcpy(out.pixels().data(), raw.bytes.data(), out.pixels().size_bytes());
    return out;
}

std::pair<RgbImage, DepthImage> load_rgb_depth_pair(const fs::path& rgb_path,
                                                    const fs::path& depth_path) {
    RgbImage rgb = load_rgb_png(rgb_path);
    DepthImage depth = load_depth_png(depth_path);
    if (rgb.width() != depth.width() || rgb.height() != depth.height()) {
        fail(ErrorCode::DimensionMismatch,
             rgb_path.string() + " is " + std::to_string(rgb.width()) + "x" +
                 std::to_string(rgb.height()) + " but " + depth_path.string() + " is " +
                 std::to_string(depth.width()) + "x" + std::to_string(depth.height()));
    }
    return {std::move(rgb), std::move(depth)};
}

GrayImage load_gray(const fs::path& path) {
    FilePtr f = open_for_read(path);
    if (!has_png_signature(f.get())) {
        f.reset();
        return read_pgm(path);
    }
    RawPng raw = read_png(f.get(), path);
    if (raw.channels == 3) {
        if (raw.bit_depth != 8) {
            fail(ErrorCode::DecodeError, path.string() + ": 16-bit colour PNG not supported");
        }
        return rgb_to_gray(RgbImage(raw.width, raw.height, std::move(raw.bytes)));
    }
    GrayImage out(raw.width, raw.height);
    auto px = out.pixels();
    if (raw.bit_depth == 16) {
        const auto* v = reinterpret_cast<const std::uint16_t*>(raw.bytes.data());
        for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<float>(v[i]) / 65535.f;
    } else {
        for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<float>(raw.bytes[i]) / 255.f;
    }
    return out;
}

void save_rgb_png(const fs::path& path, const RgbImage& img) {
    write_png(path, img.width(), img.height(), 3, 8, img.pixels().data());
}

void save_depth_png(const fs::path& path, const DepthImage& img) {
    write_png(path, img.width(), img.height(), 1, 16,
              reinterpret_cast<const std::uint8_t*>(img.pixels().data()));
}

void save_gray_png(const fs::path& path, const GrayImage& img) {
    std::vector<std::uint8_t> bytes(img.pixels().size());
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = quantize(img.pixels()[i]);
    write_png(path, img.width(), img.height(), 1, 8, bytes.data());
}

void save_pgm(const fs::path& path, const GrayImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorCode::IoError, "cannot write " + path.string());
    }
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    for (float v : img.pixels()) out.put(static_cast<char>(quantize(v)));
    if (!out) {
        fail(ErrorCode::IoError, "short write to " + path.string());
    }
}

}  // namespace rowexit
