#pragma once

#include <vector>

#include "tsom/common.hpp"
#include "tsom/config.hpp"
#include "tsom/convolve.hpp"
#include "tsom/frame.hpp"
#include "tsom/threading.hpp"

namespace tsom {

// Oriented spatial filter: Gaussian envelope times a cosine carrier along the
// preferred direction, sampled on the integer grid, then mean-subtracted so
// uniform luminance produces no response.
struct GaborKernel {
    double theta = 0.0;   // preferred direction (radians)
    double phi = 0.0;     // carrier phase (radians)
    double gamma = 0.5;   // aspect ratio
    double sigma = 2.0;   // envelope std (px)
    double lambda = 6.0;  // carrier wavelength (px)
    SpatialKernel kernel;
};

inline GaborKernel make_gabor(double theta, double phi, double gamma, double sigma,
                              double lambda, int size) {
    require(gamma > 0.0 && sigma > 0.0 && lambda > 0.0, "gabor constants must be positive");
    require(size >= 1 && size % 2 == 1, "kernel size must be odd and positive");
    GaborKernel g{theta, phi, gamma, sigma, lambda, {}};
    g.kernel.size = size;
    g.kernel.weights.resize(static_cast<std::size_t>(size) * size);
    const int r = size / 2;
    const double ct = std::cos(theta), st = std::sin(theta);
    double sum = 0.0;
    for (int y = -r; y <= r; ++y)
        for (int x = -r; x <= r; ++x) {
            const double xp = x * ct + y * st;
            const double yp = -x * st + y * ct;
            const double env =
                std::exp(-(xp * xp + gamma * gamma * yp * yp) / (2.0 * sigma * sigma));
            const double w = env * std::cos(2.0 * kPi * xp / lambda + phi);
            g.kernel.weight(x, y) = w;
            sum += w;
        }
    // DC removal: shift so the weights sum to zero.
    const double mean = sum / (static_cast<double>(size) * size);
    for (double& w : g.kernel.weights) w -= mean;
    return g;
}

// Quadrature filter bank: directions theta_k = k*pi/n over [0, pi), phases
// {0, pi/2} per direction, ordered direction-major then phase.
inline std::vector<GaborKernel> gabor_bank(const PipelineConfig& config) {
    config.validate();
    std::vector<GaborKernel> bank;
    bank.reserve(static_cast<std::size_t>(config.n_directions) * 2);
    for (int k = 0; k < config.n_directions; ++k) {
        const double theta = k * kPi / config.n_directions;
        for (double phi : {0.0, kPi / 2.0})
            bank.push_back(make_gabor(theta, phi, config.gabor_gamma, config.gabor_sigma,
                                      config.gabor_lambda, config.kernel_size));
    }
    return bank;
}

// Centered temporal derivative taps over frame offsets {-1, 0, +1}.
struct TemporalKernel {
    std::vector<double> taps;
    int radius() const { return static_cast<int>(taps.size()) / 2; }
};

inline TemporalKernel temporal_kernel() { return TemporalKernel{{-1.0, 0.0, 1.0}}; }

inline std::vector<SpatialKernel> bank_kernels(const std::vector<GaborKernel>& bank) {
    std::vector<SpatialKernel> ks;
    ks.reserve(bank.size());
    for (const GaborKernel& g : bank) ks.push_back(g.kernel);
    return ks;
}

// Temporal tap combination of ring-buffered convolved slices; shared by the
// staged stack builder and the streaming runner so both produce bit-equal
// maps. slices[k+radius] is the convolved map at source offset k.
inline Frame temporal_combine(const TemporalKernel& tk, const std::vector<const Frame*>& slices) {
    const int tr = tk.radius();
    require(static_cast<int>(slices.size()) == static_cast<int>(tk.taps.size()),
            "slice count must match tap count");
    Frame d(slices[0]->width, slices[0]->height);
    for (int k = -tr; k <= tr; ++k) {
        const double tap = tk.taps[k + tr];
        const Frame& c = *slices[k + tr];
        for (std::size_t i = 0; i < d.data.size(); ++i) d.data[i] += tap * c.data[i];
    }
    return d;
}

// Dendritic stage: for each direction/phase channel, the input sequence is
// convolved spatially with the Gabor kernel and temporally with the
// derivative taps. Border frames without both temporal neighbors are
// omitted: the stack covers source frames [1, T-1).
inline DirectionalStack dendrite_response(const Sequence& seq, const PipelineConfig& config,
                                          int n_threads = 1) {
    config.validate();
    seq.validate();
    const TemporalKernel tk = temporal_kernel();
    const int tr = tk.radius();
    require(seq.length() >= static_cast<int>(tk.taps.size()),
            "sequence shorter than the temporal tap count");
    require(config.kernel_size <= seq.width() && config.kernel_size <= seq.height(),
            "kernel larger than frame");

    const std::vector<GaborKernel> bank = gabor_bank(config);
    const int n_channels = static_cast<int>(bank.size());
    const ConvBank convs(bank_kernels(bank), seq.width(), seq.height());

    DirectionalStack stack;
    for (int k = 0; k < config.n_directions; ++k)
        stack.directions.push_back(k * kPi / config.n_directions);
    stack.phases = {0.0, kPi / 2.0};
    stack.t_begin = tr;
    stack.n_times = seq.length() - 2 * tr;
    stack.width = seq.width();
    stack.height = seq.height();
    stack.maps.resize(static_cast<std::size_t>(stack.n_times) * n_channels);

    // Ring buffer of convolved time slices: 3 slices x n_channels maps.
    const int window = static_cast<int>(tk.taps.size());
    std::vector<Frame> ring(static_cast<std::size_t>(window) * n_channels);
    for (int t = 0; t < seq.length(); ++t) {
        convs.apply_all(seq.frames[t], n_threads, [&](int j, Frame&& out) {
            ring[static_cast<std::size_t>(t % window) * n_channels + j] = std::move(out);
        });
        if (t < 2 * tr) continue;
        const int tc = t - tr;  // source index of the emitted slice
        parallel_for(n_channels, n_threads, [&](int j) {
            std::vector<const Frame*> slices(window);
            for (int k = -tr; k <= tr; ++k)
                slices[k + tr] = &ring[static_cast<std::size_t>((tc + k) % window) * n_channels + j];
            stack.maps[static_cast<std::size_t>(tc - tr) * n_channels + j] =
                temporal_combine(tk, slices);
        });
    }
    return stack;
}

}  // namespace tsom
