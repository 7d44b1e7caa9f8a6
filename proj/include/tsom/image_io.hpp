#pragma once

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "tsom/common.hpp"
#include "tsom/frame.hpp"

namespace tsom {

namespace detail {

struct PngReadGuard {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* fp = nullptr;
    ~PngReadGuard() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

struct PngWriteGuard {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* fp = nullptr;
    ~PngWriteGuard() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

}  // namespace detail

// Reads an 8-bit PNG as luminance in [0,1]; color converted by Rec. 601
// weights, 16-bit depth reduced, palette expanded, alpha dropped.
inline Frame load_png(const std::string& path) {
    detail::PngReadGuard g;
    g.fp = std::fopen(path.c_str(), "rb");
    if (!g.fp) throw IoError("cannot open image: " + path);
    g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!g.png) throw IoError("libpng init failed");
    g.info = png_create_info_struct(g.png);
    if (!g.info) throw IoError("libpng init failed");

    std::vector<png_byte> pixels;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(g.png))) throw IoError("failed to decode PNG: " + path);
    png_init_io(g.png, g.fp);
    png_read_info(g.png, g.info);

    const png_uint_32 w = png_get_image_width(g.png, g.info);
    const png_uint_32 h = png_get_image_height(g.png, g.info);
    const int color = png_get_color_type(g.png, g.info);
    const int depth = png_get_bit_depth(g.png, g.info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(g.png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(g.png);
    if (png_get_valid(g.png, g.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(g.png);
    if (depth == 16) png_set_strip_16(g.png);
    if (color & PNG_COLOR_MASK_ALPHA || png_get_valid(g.png, g.info, PNG_INFO_tRNS))
        png_set_strip_alpha(g.png);
    png_read_update_info(g.png, g.info);

    const int channels = png_get_channels(g.png, g.info);
    if (channels != 1 && channels != 3) throw IoError("unsupported channel count in " + path);
    const std::size_t stride = png_get_rowbytes(g.png, g.info);
    pixels.resize(stride * h);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = pixels.data() + y * stride;
    png_read_image(g.png, rows.data());
    png_read_end(g.png, nullptr);

    Frame out(static_cast<int>(w), static_cast<int>(h));
    for (png_uint_32 y = 0; y < h; ++y) {
        const png_byte* row = rows[y];
        double* dst = &out.data[static_cast<std::size_t>(y) * w];
        if (channels == 1) {
            for (png_uint_32 x = 0; x < w; ++x) dst[x] = row[x] / 255.0;
        } else {
            for (png_uint_32 x = 0; x < w; ++x) {
                const png_byte* p = row + 3 * x;
                dst[x] = (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0;
            }
        }
    }
    return out;
}

namespace detail {

inline void write_png_bytes(const std::string& path, int width, int height,
                            const std::vector<png_byte>& bytes) {
    PngWriteGuard g;
    g.fp = std::fopen(path.c_str(), "wb");
    if (!g.fp) throw IoError("cannot write image: " + path);
    g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!g.png) throw IoError("libpng init failed");
    g.info = png_create_info_struct(g.png);
    if (!g.info) throw IoError("libpng init failed");
    std::vector<png_bytep> rows(height);
    if (setjmp(png_jmpbuf(g.png))) throw IoError("failed to encode PNG: " + path);
    png_init_io(g.png, g.fp);
    png_set_IHDR(g.png, g.info, width, height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(g.png, g.info);
    for (int y = 0; y < height; ++y)
        rows[y] = const_cast<png_bytep>(bytes.data() + static_cast<std::size_t>(y) * width);
    png_write_image(g.png, rows.data());
    png_write_end(g.png, nullptr);
}

}  // namespace detail

// Writes luminance [0,1] as 8-bit gray, clamped and rounded — no rescaling.
// Inverse of load_png for 8-bit grayscale inputs.
inline void save_frame(const Frame& f, const std::string& path) {
    std::vector<png_byte> bytes(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        double v = f.data[i];
        if (v < 0.0) v = 0.0; else if (v > 1.0) v = 1.0;
        bytes[i] = static_cast<png_byte>(std::lround(v * 255.0));
    }
    detail::write_png_bytes(path, f.width, f.height, bytes);
}

// Writes an arbitrary real map min-max normalized to [0,255]; a constant map
// (min = max) is written as all zeros.
inline void save_map(const Frame& map, const std::string& path) {
    double lo = map.data.empty() ? 0.0 : map.data[0], hi = lo;
    for (double v : map.data) {
        require(std::isfinite(v), "save_map requires finite values");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::vector<png_byte> bytes(map.size(), 0);
    if (hi > lo) {
        const double scale = 255.0 / (hi - lo);
        for (std::size_t i = 0; i < map.size(); ++i)
            bytes[i] = static_cast<png_byte>(std::lround((map.data[i] - lo) * scale));
    }
    detail::write_png_bytes(path, map.width, map.height, bytes);
}

// Marks each detection with a white ring of radius 5 px (the evaluation match
// radius); pixels outside those rings are untouched. Frame indices on the
// detections are ignored — pass the detections belonging to this frame.
inline Frame overlay_detections(const Frame& frame, const std::vector<Detection>& detections) {
    Frame out = frame;
    constexpr int radius = 5;
    for (const Detection& d : detections) {
        for (int dy = -radius; dy <= radius; ++dy) {
            for (int dx = -radius; dx <= radius; ++dx) {
                const double dist = std::sqrt(static_cast<double>(dx * dx + dy * dy));
                if (dist < 4.5 || dist > 5.49) continue;
                const int x = d.x + dx, y = d.y + dy;
                if (x < 0 || x >= out.width || y < 0 || y >= out.height) continue;
                out.at(x, y) = 1.0;
            }
        }
    }
    return out;
}

// Filename comparison treating digit runs as numbers: frame2 < frame10.
inline bool natural_less(const std::string& a, const std::string& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
        const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
        if (da && db) {
            std::size_t i0 = i, j0 = j;
            while (i < a.size() && std::isdigit(static_cast<unsigned char>(a[i]))) ++i;
            while (j < b.size() && std::isdigit(static_cast<unsigned char>(b[j]))) ++j;
            std::string na = a.substr(i0, i - i0), nb = b.substr(j0, j - j0);
            const std::string ta = na.substr(std::min(na.find_first_not_of('0'), na.size() - 1));
            const std::string tb = nb.substr(std::min(nb.find_first_not_of('0'), nb.size() - 1));
            if (ta.size() != tb.size()) return ta.size() < tb.size();
            if (ta != tb) return ta < tb;
            if (na.size() != nb.size()) return na.size() < nb.size();  // fewer zeros first
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    return a.size() < b.size();
}

// Loads a directory of numbered PNG frames (or a single PNG) as a sequence.
inline Sequence load_sequence(const std::string& path, double fps = 50.0) {
    namespace fs = std::filesystem;
    require(fps > 0.0, "fps must be positive");
    if (!fs::exists(path)) throw IoError("no such path: " + path);
    std::vector<std::string> files;
    if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path)) {
            if (!entry.is_regular_file()) continue;
            std::string ext = entry.path().extension().string();
            std::transform(ext.begin(), ext.end(), ext.begin(),
                           [](unsigned char c) { return std::tolower(c); });
            if (ext == ".png") files.push_back(entry.path().string());
        }
        std::sort(files.begin(), files.end(), [](const std::string& x, const std::string& y) {
            return natural_less(fs::path(x).filename().string(),
                                fs::path(y).filename().string());
        });
        if (files.empty()) throw IoError("no PNG frames found in " + path);
    } else {
        files.push_back(path);
    }
    Sequence seq;
    seq.fps = fps;
    seq.frames.reserve(files.size());
    for (const std::string& f : files) {
        Frame frame = load_png(f);
        if (!seq.frames.empty() && !frame.same_shape(seq.frames.front()))
            throw IoError("frame dimensions differ from the first frame: " + f);
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

}  // namespace tsom
