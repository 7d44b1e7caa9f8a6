#pragma once

#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tsom/common.hpp"
#include "tsom/frame.hpp"

namespace tsom {

// Scene description: a large background scrolled behind a fixed viewport
// with one small disk moving over it.
struct SynthConfig {
    std::shared_ptr<const Frame> background;  // strictly larger than frame + scroll
    int frame_size = 512;
    int n_frames = 20;
    double fps = 50.0;
    double v_a = 150.0;       // object speed, px/s
    double v_b = 150.0;       // background speed, px/s
    double theta_obj = 0.0;   // object direction, radians
    double theta_bg = 0.0;    // background direction, radians
    double radius = 3.0;      // object radius, px
    double luminance = 0.0;   // object gray level in [0,1]
    double start_x = 256.0;   // initial object center
    double start_y = 256.0;
    // Objects reflect off an interior margin so they stay visible for any
    // trial length (trajectory shape is otherwise free; speed is preserved).
    bool bounce = true;

    void validate() const {
        require(background && background->width > 0, "background frame required");
        require(frame_size >= 32, "frame_size too small");
        require(n_frames >= 1, "n_frames must be positive");
        require(fps > 0.0, "fps must be positive");
        require(v_a >= 0.0 && v_b >= 0.0, "speeds must be non-negative");
        require(radius >= 1.0, "radius must be at least 1 px");
        require(luminance >= 0.0 && luminance <= 1.0, "luminance must lie in [0,1]");
    }
};

// Per-frame object center in output-frame coordinates.
struct GroundTruth {
    struct Entry {
        int frame = 0;
        int x = 0;
        int y = 0;
    };
    std::vector<Entry> entries;
};

namespace detail {

inline double bilinear_clamped(const Frame& f, double fx, double fy) {
    const int x0 = static_cast<int>(std::floor(fx));
    const int y0 = static_cast<int>(std::floor(fy));
    const double wx = fx - x0, wy = fy - y0;
    const double a = f.at_clamped(x0, y0), b = f.at_clamped(x0 + 1, y0);
    const double c = f.at_clamped(x0, y0 + 1), d = f.at_clamped(x0 + 1, y0 + 1);
    return (1.0 - wy) * ((1.0 - wx) * a + wx * b) + wy * ((1.0 - wx) * c + wx * d);
}

}  // namespace detail

// Renders the scene. Frame k samples the background at scroll offset
// k*(v_b/fps)*(cos theta_bg, sin theta_bg) (bilinear for fractional offsets;
// integer offsets are exact pixel copies) and composites an anti-aliased
// disk (coverage-weighted edge) at the object position. Ground truth records
// the disk center rounded to the nearest pixel.
inline std::pair<Sequence, GroundTruth> generate(const SynthConfig& config) {
    config.validate();
    const Frame& bg = *config.background;
    const int n = config.n_frames, fsz = config.frame_size;

    // Background scroll offsets and the crop base keeping every window inside.
    const double step_bx = config.v_b / config.fps * std::cos(config.theta_bg);
    const double step_by = config.v_b / config.fps * std::sin(config.theta_bg);
    double min_ox = 0.0, max_ox = 0.0, min_oy = 0.0, max_oy = 0.0;
    for (int k = 0; k < n; ++k) {
        min_ox = std::min(min_ox, k * step_bx);
        max_ox = std::max(max_ox, k * step_bx);
        min_oy = std::min(min_oy, k * step_by);
        max_oy = std::max(max_oy, k * step_by);
    }
    const double base_x = -min_ox, base_y = -min_oy;
    require(base_x + max_ox + fsz <= bg.width && base_y + max_oy + fsz <= bg.height,
            "scroll exceeds background extent");

    // Object path: constant speed, reflecting off the visibility margin.
    const int margin = static_cast<int>(std::ceil(config.radius)) + 6;
    const double lo_x = margin, hi_x = fsz - 1.0 - margin;
    const double lo_y = margin, hi_y = fsz - 1.0 - margin;
    require(hi_x > lo_x && hi_y > lo_y, "frame too small for the object margin");
    double px = config.start_x, py = config.start_y;
    require(px >= 0.0 && px < fsz && py >= 0.0 && py < fsz, "start outside the frame");
    double dir_x = std::cos(config.theta_obj), dir_y = std::sin(config.theta_obj);
    const double speed = config.v_a / config.fps;

    Sequence seq;
    seq.fps = config.fps;
    seq.frames.reserve(n);
    GroundTruth gt;
    gt.entries.reserve(n);

    for (int k = 0; k < n; ++k) {
        // Render the scrolled crop.
        const double ox = base_x + k * step_bx, oy = base_y + k * step_by;
        Frame f(fsz, fsz);
        const bool integer_offset = ox == std::floor(ox) && oy == std::floor(oy);
        if (integer_offset) {
            const int ix = static_cast<int>(ox), iy = static_cast<int>(oy);
            for (int y = 0; y < fsz; ++y) {
                const double* src = &bg.data[static_cast<std::size_t>(iy + y) * bg.width + ix];
                double* dst = &f.data[static_cast<std::size_t>(y) * fsz];
                for (int x = 0; x < fsz; ++x) dst[x] = src[x];
            }
        } else {
            for (int y = 0; y < fsz; ++y)
                for (int x = 0; x < fsz; ++x)
                    f.at(x, y) = detail::bilinear_clamped(bg, ox + x, oy + y);
        }

        // Composite the disk with coverage-weighted edge pixels.
        const int x0 = std::max(0, static_cast<int>(std::floor(px - config.radius - 1.0)));
        const int x1 = std::min(fsz - 1, static_cast<int>(std::ceil(px + config.radius + 1.0)));
        const int y0 = std::max(0, static_cast<int>(std::floor(py - config.radius - 1.0)));
        const int y1 = std::min(fsz - 1, static_cast<int>(std::ceil(py + config.radius + 1.0)));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                const double dist = std::hypot(x - px, y - py);
                double cov = config.radius + 0.5 - dist;
                if (cov <= 0.0) continue;
                if (cov > 1.0) cov = 1.0;
                f.at(x, y) = (1.0 - cov) * f.at(x, y) + cov * config.luminance;
            }

        seq.frames.push_back(std::move(f));
        gt.entries.push_back({k, static_cast<int>(std::lround(px)),
                              static_cast<int>(std::lround(py))});

        // Advance and reflect.
        px += speed * dir_x;
        py += speed * dir_y;
        if (config.bounce) {
            while (px > hi_x || px < lo_x) {
                if (px > hi_x) px = 2.0 * hi_x - px;
                if (px < lo_x) px = 2.0 * lo_x - px;
                dir_x = -dir_x;
            }
            while (py > hi_y || py < lo_y) {
                if (py > hi_y) py = 2.0 * hi_y - py;
                if (py < lo_y) py = 2.0 * lo_y - py;
                dir_y = -dir_y;
            }
        }
    }
    return {std::move(seq), std::move(gt)};
}

// Deterministic aerial-like texture: multi-octave value noise with a
// red-weighted amplitude spectrum (energy concentrated at coarse scales, so
// the background carries no isolated few-pixel high-contrast blobs), affinely
// mapped to mean 0.5 / std 0.15 and clamped to [0.05, 0.95].
inline Frame make_aerial_background(int width, int height, std::uint64_t seed) {
    require(width >= 64 && height >= 64, "background too small");
    Frame out(width, height);
    const int cells[] = {256, 128, 64, 32, 16, 8, 4};
    const double amps[] = {1.0, 0.75, 0.55, 0.35, 0.2, 0.1, 0.05};
    for (int o = 0; o < 7; ++o) {
        const int cell = cells[o];
        const double amp = amps[o];
        const int gw = width / cell + 2, gh = height / cell + 2;
        std::vector<double> lattice(static_cast<std::size_t>(gw) * gh);
        for (int gy = 0; gy < gh; ++gy)
            for (int gx = 0; gx < gw; ++gx)
                lattice[static_cast<std::size_t>(gy) * gw + gx] = u01(hash64(
                    hash64(hash64(seed + 0x517cc1b727220a95ULL * (o + 1)) ^
                           static_cast<std::uint64_t>(gx)) ^
                    static_cast<std::uint64_t>(gy)));
        const double inv_cell = 1.0 / cell;
        for (int y = 0; y < height; ++y) {
            const int gy = y / cell;
            double ty = (y - gy * cell) * inv_cell;
            ty = ty * ty * (3.0 - 2.0 * ty);  // smoothstep
            const double* row0 = &lattice[static_cast<std::size_t>(gy) * gw];
            const double* row1 = row0 + gw;
            double* dst = &out.data[static_cast<std::size_t>(y) * width];
            for (int x = 0; x < width; ++x) {
                const int gx = x / cell;
                double tx = (x - gx * cell) * inv_cell;
                tx = tx * tx * (3.0 - 2.0 * tx);
                const double v0 = row0[gx] + tx * (row0[gx + 1] - row0[gx]);
                const double v1 = row1[gx] + tx * (row1[gx + 1] - row1[gx]);
                dst[x] += amp * (v0 + ty * (v1 - v0));
            }
        }
    }
    double sum = 0.0;
    for (double v : out.data) sum += v;
    const double mean = sum / out.size();
    double ss = 0.0;
    for (double v : out.data) ss += (v - mean) * (v - mean);
    const double stddev = std::sqrt(ss / out.size());
    const double gain = stddev > 0.0 ? 0.15 / stddev : 0.0;
    for (double& v : out.data) {
        v = 0.5 + gain * (v - mean);
        if (v < 0.05) v = 0.05; else if (v > 0.95) v = 0.95;
    }
    return out;
}

// The five trial families of the synthetic benchmark: object-speed sweep,
// radius sweep, object-luminance sweep, background-speed sweep, and the
// opposite-direction trial. Held-constant companions: v_a = v_b = 150 px/s,
// radius 3, luminance 0, co-directional motion, 200 frames per trial.
inline std::vector<std::pair<SynthConfig, std::string>> bevs_suite(
    std::shared_ptr<const Frame> base_background, std::uint64_t seed = 0) {
    SynthConfig base;
    base.background = std::move(base_background);
    base.n_frames = 200;
    char label[64];
    std::vector<std::pair<SynthConfig, std::string>> suite;
    // Each trial starts at a seed-determined position in the central third of
    // the frame so trials sample independent background neighborhoods.
    auto push = [&suite, seed](SynthConfig c, const std::string& name) {
        const std::uint64_t h = hash64(seed ^ hash64(suite.size() + 1));
        const double span = c.frame_size / 3.0;
        c.start_x = c.frame_size / 3.0 + span * u01(h);
        c.start_y = c.frame_size / 3.0 + span * u01(hash64(h));
        suite.emplace_back(std::move(c), name);
    };
    for (int v = 0; v <= 400; v += 25) {
        SynthConfig c = base;
        c.v_a = v;
        std::snprintf(label, sizeof(label), "seq1_va_%03d", v);
        push(c, label);
    }
    for (int r = 1; r <= 20; ++r) {
        SynthConfig c = base;
        c.radius = r;
        std::snprintf(label, sizeof(label), "seq2_radius_%02d", r);
        push(c, label);
    }
    for (int l = 0; l <= 10; ++l) {
        SynthConfig c = base;
        c.luminance = l / 10.0;
        std::snprintf(label, sizeof(label), "seq3_lm_%02d", l);
        push(c, label);
    }
    for (int v = 0; v <= 400; v += 25) {
        SynthConfig c = base;
        c.v_b = v;
        std::snprintf(label, sizeof(label), "seq4_vb_%03d", v);
        push(c, label);
    }
    {
        SynthConfig c = base;
        c.theta_bg = kPi;  // background opposing the object
        push(c, "seq5_opposite");
    }
    return suite;
}

// Ground truth CSV: header then one `frame,x,y` row per frame.
inline void write_ground_truth_csv(const GroundTruth& gt, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot write ground truth: " + path);
    std::fprintf(f, "frame,x,y\n");
    for (const auto& e : gt.entries) std::fprintf(f, "%d,%d,%d\n", e.frame, e.x, e.y);
    std::fclose(f);
}

}  // namespace tsom
