#pragma once

#include <vector>

#include "tsom/common.hpp"
#include "tsom/convolve.hpp"
#include "tsom/frame.hpp"
#include "tsom/threading.hpp"

namespace tsom {

// 1-D Gaussian samples exp(-x^2 / 2 sigma^2) at integer offsets, renormalized
// to sum 1. The 2-D smoothing kernel is the outer product of these taps.
inline std::vector<double> gaussian_taps(double sigma, int size) {
    require(sigma > 0.0, "sigma must be positive");
    require(size >= 1 && size % 2 == 1, "kernel size must be odd and positive");
    const int r = size / 2;
    std::vector<double> taps(size);
    double sum = 0.0;
    for (int x = -r; x <= r; ++x) {
        taps[x + r] = std::exp(-(static_cast<double>(x) * x) / (2.0 * sigma * sigma));
        sum += taps[x + r];
    }
    for (double& t : taps) t /= sum;
    return taps;
}

// Isotropic Gaussian smoothing kernel sampled on the centered integer grid
// and renormalized so the weights sum to exactly 1.
inline SpatialKernel gaussian_kernel(double sigma1, int size) {
    require(sigma1 > 0.0, "sigma must be positive");
    require(size >= 1 && size % 2 == 1, "kernel size must be odd and positive");
    const int r = size / 2;
    SpatialKernel k;
    k.size = size;
    k.weights.resize(static_cast<std::size_t>(size) * size);
    const double inv = 1.0 / (2.0 * kPi * sigma1 * sigma1);
    double sum = 0.0;
    for (int v = -r; v <= r; ++v)
        for (int u = -r; u <= r; ++u) {
            const double w =
                inv * std::exp(-(static_cast<double>(u) * u + static_cast<double>(v) * v) /
                               (2.0 * sigma1 * sigma1));
            k.weight(u, v) = w;
            sum += w;
        }
    for (double& w : k.weights) w /= sum;
    return k;
}

namespace detail {

// One smoothed frame; separable fast path when the kernel factorizes.
inline Frame retina_apply(const Frame& f, const SpatialKernel& kernel,
                          const std::optional<std::pair<std::vector<double>,
                                                        std::vector<double>>>& factors) {
    if (factors) return convolve_separable(f, factors->first, factors->second);
    return convolve(f, kernel);
}

}  // namespace detail

// Retinal ganglion stage: per-frame 2-D convolution with the smoothing
// kernel, replicate borders, output dimensions preserved.
inline Sequence retina_layer(const Sequence& seq, const SpatialKernel& kernel,
                             int n_threads = 1) {
    kernel.validate();
    seq.validate();
    require(seq.length() > 0, "empty sequence");
    require(kernel.size <= seq.width() && kernel.size <= seq.height(), "kernel larger than frame");
    const auto factors = rank1_factors(kernel);
    Sequence out;
    out.fps = seq.fps;
    out.frames.resize(seq.frames.size());
    parallel_for(seq.length(), n_threads, [&](int i) {
        out.frames[i] = detail::retina_apply(seq.frames[i], kernel, factors);
    });
    return out;
}

// Single-frame entry used by the streaming runner and the baseline detector.
inline Frame retina_frame(const Frame& f, const SpatialKernel& kernel) {
    require(kernel.size <= f.width && kernel.size <= f.height, "kernel larger than frame");
    return detail::retina_apply(f, kernel, rank1_factors(kernel));
}

}  // namespace tsom
