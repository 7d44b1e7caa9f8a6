#pragma once

#include <algorithm>
#include <vector>

#include "tsom/common.hpp"
#include "tsom/frame.hpp"
#include "tsom/threading.hpp"

namespace tsom {

// Per-direction, per-time non-negative energy maps.
struct EnergyStack {
    std::vector<double> directions;
    int t_begin = 0;
    int n_times = 0;
    int width = 0;
    int height = 0;
    std::vector<Frame> maps;  // index: t * D + d

    int n_directions() const { return static_cast<int>(directions.size()); }
    Frame& map(int t, int d) { return maps[static_cast<std::size_t>(t) * n_directions() + d]; }
    const Frame& map(int t, int d) const {
        return maps[static_cast<std::size_t>(t) * n_directions() + d];
    }

    void validate() const {
        require(!directions.empty(), "energy stack needs at least one direction");
        require(maps.size() == static_cast<std::size_t>(n_times) * n_directions(),
                "energy stack map count mismatch");
        for (const Frame& f : maps)
            require(f.width == width && f.height == height, "energy map size mismatch");
    }
};

// Quadrature combination for one direction/time:
//   E'(x,y) = sqrt(S_phi^2 + S_{phi+pi/2}^2).
inline Frame motion_energy_map(const Frame& s0, const Frame& s90) {
    require(s0.same_shape(s90), "quadrature maps must share one size");
    Frame out(s0.width, s0.height);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data[i] = std::sqrt(s0.data[i] * s0.data[i] + s90.data[i] * s90.data[i]);
    return out;
}

inline EnergyStack motion_energy(const DirectionalStack& stack, int n_threads = 1) {
    stack.validate();
    require(stack.n_phases() == 2 &&
                std::abs(std::abs(stack.phases[1] - stack.phases[0]) - kPi / 2.0) < 1e-9,
            "stack must carry a quadrature phase pair");
    EnergyStack e;
    e.directions = stack.directions;
    e.t_begin = stack.t_begin;
    e.n_times = stack.n_times;
    e.width = stack.width;
    e.height = stack.height;
    e.maps.resize(static_cast<std::size_t>(e.n_times) * e.n_directions());
    parallel_for(e.n_times * e.n_directions(), n_threads, [&](int i) {
        const int t = i / e.n_directions(), d = i % e.n_directions();
        e.maps[i] = motion_energy_map(stack.map(t, d, 0), stack.map(t, d, 1));
    });
    return e;
}

namespace detail {

inline constexpr double kFlickerGuard = 1e-6;

}  // namespace detail

// One time slice of flicker normalization: divides every directional energy
// by the slice-wide mean energy plus the guard. Shared by the staged stack op
// and the streaming runner.
inline std::vector<Frame> flicker_normalize_slice(const std::vector<const Frame*>& eprime) {
    require(!eprime.empty(), "need at least one direction");
    const int nd = static_cast<int>(eprime.size());
    const Frame& first = *eprime[0];
    double flk = 0.0;
    for (int d = 0; d < nd; ++d) {
        const Frame& e = *eprime[d];
        require(e.same_shape(first), "direction maps must share one size");
        for (double v : e.data) flk += v;
    }
    flk /= static_cast<double>(nd) * static_cast<double>(first.size());
    const double inv = 1.0 / (flk + detail::kFlickerGuard);
    std::vector<Frame> out(eprime.size());
    for (int d = 0; d < nd; ++d) {
        const Frame& e = *eprime[d];
        Frame o(e.width, e.height);
        for (std::size_t i = 0; i < o.size(); ++i) o.data[i] = e.data[i] * inv;
        out[d] = std::move(o);
    }
    return out;
}

// Flicker normalization: each frame's directional energies are divided by the
// mean energy taken over every direction and pixel of that frame (plus a small
// guard). Frame-wide change such as global luminance flicker inflates the
// divisor and is discounted, while the ordering of responses within the frame
// -- which pixel is strongest, and which direction wins at a pixel -- is kept.
inline EnergyStack flicker_normalize(const EnergyStack& energy, int n_threads = 1) {
    energy.validate();
    EnergyStack out = energy;
    const int nd = energy.n_directions();
    parallel_for(energy.n_times, n_threads, [&](int t) {
        std::vector<const Frame*> slice(nd);
        for (int d = 0; d < nd; ++d) slice[d] = &energy.map(t, d);
        std::vector<Frame> norm = flicker_normalize_slice(slice);
        for (int d = 0; d < nd; ++d) out.map(t, d) = std::move(norm[d]);
    });
    return out;
}

namespace detail {

// Sliding maximum along x over a centered window of the given size.
inline void max_pool_rows(const Frame& in, int pool, Frame& out) {
    const int lo = (pool - 1) / 2, hi = pool / 2;
    for (int y = 0; y < in.height; ++y) {
        const double* row = &in.data[static_cast<std::size_t>(y) * in.width];
        double* orow = &out.data[static_cast<std::size_t>(y) * in.width];
        for (int x = 0; x < in.width; ++x) {
            const int a = std::max(0, x - lo), b = std::min(in.width - 1, x + hi);
            double m = row[a];
            for (int i = a + 1; i <= b; ++i) m = std::max(m, row[i]);
            orow[x] = m;
        }
    }
}

}  // namespace detail

// Same-size stride-1 max pooling with a centered window; out-of-range window
// cells replicate the border, which for max pooling equals clamping the
// window to the frame.
inline Frame max_pool(const Frame& in, int pool_size) {
    require(pool_size >= 1, "pool size must be positive");
    if (pool_size == 1) return in;
    Frame rows(in.width, in.height), out(in.width, in.height);
    detail::max_pool_rows(in, pool_size, rows);
    // Column pass over the row-pooled map.
    const int lo = (pool_size - 1) / 2, hi = pool_size / 2;
    for (int y = 0; y < in.height; ++y) {
        const int a = std::max(0, y - lo), b = std::min(in.height - 1, y + hi);
        double* orow = &out.data[static_cast<std::size_t>(y) * in.width];
        for (int x = 0; x < in.width; ++x) {
            double m = rows.at(x, a);
            for (int yy = a + 1; yy <= b; ++yy) m = std::max(m, rows.at(x, yy));
            orow[x] = m;
        }
    }
    return out;
}

// One time slice of pooling plus directional combination; shared by the
// staged op and the streaming runner.
inline Frame pool_combine_slice(const std::vector<const Frame*>& e_maps,
                                const std::vector<double>& alpha, int pool_size) {
    require(e_maps.size() == alpha.size(), "alpha length must equal direction count");
    for (double a : alpha) require(a >= 0.0 && std::isfinite(a), "alpha must be >= 0");
    require(pool_size >= 1, "pool size must be positive");
    Frame o(e_maps[0]->width, e_maps[0]->height);
    for (std::size_t d = 0; d < e_maps.size(); ++d) {
        const Frame pooled = max_pool(*e_maps[d], pool_size);
        const double a = alpha[d];
        for (std::size_t i = 0; i < o.size(); ++i) o.data[i] += a * pooled.data[i];
    }
    return o;
}

// Receptive-field coarsening plus directional combination:
//   O(x,y,t) = sum_theta alpha_theta * maxpool(E_theta)(x,y,t).
inline std::vector<Frame> pool_and_combine(const EnergyStack& energy,
                                           const std::vector<double>& alpha, int pool_size,
                                           int n_threads = 1) {
    energy.validate();
    require(static_cast<int>(alpha.size()) == energy.n_directions(),
            "alpha length must equal direction count");
    std::vector<Frame> out(static_cast<std::size_t>(energy.n_times));
    parallel_for(energy.n_times, n_threads, [&](int t) {
        std::vector<const Frame*> slice(energy.n_directions());
        for (int d = 0; d < energy.n_directions(); ++d) slice[d] = &energy.map(t, d);
        out[t] = pool_combine_slice(slice, alpha, pool_size);
    });
    return out;
}

namespace detail {

// Strict local maxima over the 8-neighborhood (in-bounds neighbors only).
inline std::vector<Detection> strict_maxima(const Frame& o, double score_floor) {
    std::vector<Detection> found;
    for (int y = 0; y < o.height; ++y) {
        for (int x = 0; x < o.width; ++x) {
            const double v = o.at(x, y);
            if (!(v > score_floor)) continue;
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int xx = x + dx, yy = y + dy;
                    if (xx < 0 || xx >= o.width || yy < 0 || yy >= o.height) continue;
                    if (!(v > o.at(xx, yy))) {
                        is_max = false;
                        break;
                    }
                }
            if (is_max) found.push_back(Detection{x, y, 0, v});
        }
    }
    return found;
}

inline bool detection_order(const Detection& a, const Detection& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
}

}  // namespace detail

// Detections for one output map, stamped with source frame index t.
inline std::vector<Detection> detect_frame(const Frame& o, int t, int top_k,
                                           double score_floor) {
    require(top_k >= 1, "top_k must be positive");
    std::vector<Detection> found = detail::strict_maxima(o, score_floor);
    std::sort(found.begin(), found.end(), detail::detection_order);
    if (static_cast<int>(found.size()) > top_k) found.resize(top_k);
    for (Detection& d : found) d.t = t;
    return found;
}

// Localization: per frame, the top_k strict 8-neighborhood local maxima with
// score above score_floor, ordered by descending score; ties broken by lowest
// (y, x). top_k=1 with floor 0 reduces to a plain argmax. Output Detection.t
// carries the source frame index (t_begin + position).
inline std::vector<Detection> detect(const std::vector<Frame>& output_maps, int t_begin,
                                     int top_k, double score_floor) {
    require(top_k >= 1, "top_k must be positive");
    std::vector<Detection> all;
    for (std::size_t ti = 0; ti < output_maps.size(); ++ti) {
        for (Detection& d :
             detect_frame(output_maps[ti], t_begin + static_cast<int>(ti), top_k, score_floor))
            all.push_back(d);
    }
    return all;
}

}  // namespace tsom
