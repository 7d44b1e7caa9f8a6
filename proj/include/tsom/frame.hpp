#pragma once

#include <utility>
#include <vector>

#include "tsom/common.hpp"

namespace tsom {

// Single grayscale image, luminance in [0,1], row-major storage.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    Frame() = default;
    Frame(int w, int h, double fill = 0.0) : width(w), height(h) {
        require(w > 0 && h > 0, "frame dimensions must be positive");
        data.assign(static_cast<std::size_t>(w) * h, fill);
    }
    Frame(int w, int h, std::vector<double> values)
        : width(w), height(h), data(std::move(values)) {
        require(w > 0 && h > 0, "frame dimensions must be positive");
        require(data.size() == static_cast<std::size_t>(w) * h,
                "frame data size must equal width*height");
    }

    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

    // Reads with coordinates clamped to the border (replicate padding).
    double at_clamped(int x, int y) const {
        if (x < 0) x = 0; else if (x >= width) x = width - 1;
        if (y < 0) y = 0; else if (y >= height) y = height - 1;
        return at(x, y);
    }

    std::size_t size() const { return data.size(); }
    bool same_shape(const Frame& o) const { return width == o.width && height == o.height; }

    bool operator==(const Frame& o) const = default;
};

// Ordered frames plus the capture rate they were sampled at.
struct Sequence {
    std::vector<Frame> frames;
    double fps = 50.0;

    int length() const { return static_cast<int>(frames.size()); }
    int width() const { return frames.empty() ? 0 : frames.front().width; }
    int height() const { return frames.empty() ? 0 : frames.front().height; }

    void validate() const {
        require(fps > 0.0, "fps must be positive");
        for (const Frame& f : frames)
            require(f.same_shape(frames.front()), "all frames must share one size");
    }
};

// One located object candidate.
struct Detection {
    int x = 0;
    int y = 0;
    int t = 0;
    double score = 0.0;

    bool operator==(const Detection&) const = default;
};

// Per-direction (and optionally per-phase) map stacks over the interior
// time range [t_begin, t_begin + n_times) of a source sequence.
struct DirectionalStack {
    std::vector<double> directions;  // orientation angles, radians
    std::vector<double> phases;      // empty means one channel per direction
    int t_begin = 0;
    int n_times = 0;
    int width = 0;
    int height = 0;
    std::vector<Frame> maps;  // index: ((t * D) + d) * P + p

    int n_directions() const { return static_cast<int>(directions.size()); }
    int n_phases() const { return phases.empty() ? 1 : static_cast<int>(phases.size()); }

    std::size_t index(int t, int d, int p = 0) const {
        return (static_cast<std::size_t>(t) * n_directions() + d) * n_phases() + p;
    }
    Frame& map(int t, int d, int p = 0) { return maps[index(t, d, p)]; }
    const Frame& map(int t, int d, int p = 0) const { return maps[index(t, d, p)]; }

    void validate() const {
        require(!directions.empty(), "stack needs at least one direction");
        require(n_times >= 0, "negative time extent");
        require(maps.size() == static_cast<std::size_t>(n_times) * n_directions() * n_phases(),
                "stack map count mismatch");
        for (const Frame& f : maps)
            require(f.width == width && f.height == height, "stack map size mismatch");
    }
};

}  // namespace tsom
