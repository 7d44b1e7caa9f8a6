#pragma once

#include <vector>

#include "tsom/common.hpp"
#include "tsom/convolve.hpp"
#include "tsom/frame.hpp"
#include "tsom/threading.hpp"

namespace tsom {

// Center-surround (difference-of-Gaussians) lateral-inhibition kernel
//   w(x,y) = exp(-a r~^2) - mu * exp(-r~^2),  r~^2 = x~^2 + y~^2,
// with grid coordinates normalized so the extreme offsets sit at +/-1
// (x~ = 2x/(size-1)). On the raw integer grid the exponentials would be
// effectively zero by radius 3; normalization realizes the intended
// center-surround structure at any kernel size. Positive center, negative
// surround (for a > 1, mu > 0), selective for few-pixel blobs.
struct ScaleKernel {
    double a = 4.0;
    double mu = 0.5;
    SpatialKernel kernel;
};

namespace detail {

inline double scale_coord(int x, int size) { return 2.0 * x / (size - 1); }

// 1-D factor exp(-a x~^2); the 2-D kernel is rank-2:
//   w = ga(x) ga(y) - mu * g1(x) g1(y).
inline std::vector<double> scale_taps(double a, int size) {
    const int r = size / 2;
    std::vector<double> taps(size);
    for (int x = -r; x <= r; ++x) {
        const double c = scale_coord(x, size);
        taps[x + r] = std::exp(-a * c * c);
    }
    return taps;
}

}  // namespace detail

inline ScaleKernel scale_kernel(double a, double mu, int size) {
    require(a > 1.0, "scale kernel needs a > 1");
    require(mu > 0.0 && mu < 1.0, "scale kernel needs mu in (0,1)");
    require(size >= 3 && size % 2 == 1, "scale kernel size must be odd and >= 3");
    ScaleKernel sk{a, mu, {}};
    sk.kernel.size = size;
    sk.kernel.weights.resize(static_cast<std::size_t>(size) * size);
    const int r = size / 2;
    for (int y = -r; y <= r; ++y)
        for (int x = -r; x <= r; ++x) {
            const double cx = detail::scale_coord(x, size), cy = detail::scale_coord(y, size);
            const double r2 = cx * cx + cy * cy;
            sk.kernel.weight(x, y) = std::exp(-a * r2) - mu * std::exp(-r2);
        }
    return sk;
}

// Radial profile of the kernel at squared normalized radius r2.
inline double scale_profile(double a, double mu, double r2) {
    return std::exp(-a * r2) - mu * std::exp(-r2);
}

// Scale-selective lateral inhibition on one map: half-wave-rectified
// convolution with the center-surround kernel, replicate borders. Runs the
// exact rank-2 separable decomposition.
inline Frame scale_select_map(const Frame& d, const ScaleKernel& sk) {
    const int size = sk.kernel.size;
    require(size <= d.width && size <= d.height, "kernel larger than frame");
    const std::vector<double> ga = detail::scale_taps(sk.a, size);
    const std::vector<double> g1 = detail::scale_taps(1.0, size);
    Frame out = convolve_rank2(d, ga, ga, g1, g1, -sk.mu);
    for (double& v : out.data)
        if (v < 0.0) v = 0.0;
    return out;
}

inline DirectionalStack scale_select(const DirectionalStack& stack, const ScaleKernel& sk,
                                     int n_threads = 1) {
    stack.validate();
    DirectionalStack out = stack;
    parallel_for(static_cast<int>(stack.maps.size()), n_threads,
                 [&](int i) { out.maps[i] = scale_select_map(stack.maps[i], sk); });
    return out;
}

// Z-score of one map against its own population statistics (all pixels of
// the map at fixed direction/phase/time). A dispersion of exactly zero maps
// to the all-zero raster.
inline Frame zscore_map(const Frame& map) {
    for (double v : map.data) require(std::isfinite(v), "zscore_map requires finite values");
    Frame out(map.width, map.height);  // rejects empty maps before data access
    const double n = static_cast<double>(map.size());
    double sum = 0.0;
    double lo = map.data.front(), hi = map.data.front();
    for (double v : map.data) {
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    // Constant maps have zero dispersion by definition; detect them exactly so
    // that rounding in the running sum (for non-dyadic constants the computed
    // mean can differ from the constant by one ulp) cannot turn a flat map
    // into a +/-1 raster.
    if (lo == hi) return out;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : map.data) {
        const double d = v - mean;
        ss += d * d;
    }
    const double stddev = std::sqrt(ss / n);  // population (1/N) form
    if (stddev == 0.0) return out;
    for (std::size_t i = 0; i < map.size(); ++i) out.data[i] = (map.data[i] - mean) / stddev;
    return out;
}

// Statistical background suppression on one map:
//   S = S' * max(z - epsilon, 0).
inline Frame background_suppress_map(const Frame& sprime, double epsilon) {
    require(epsilon >= 0.0, "epsilon must be non-negative");
    const Frame z = zscore_map(sprime);
    Frame out(sprime.width, sprime.height);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double gate = z.data[i] - epsilon;
        out.data[i] = gate > 0.0 ? sprime.data[i] * gate : 0.0;
    }
    return out;
}

inline DirectionalStack background_suppress(const DirectionalStack& stack, double epsilon,
                                            int n_threads = 1) {
    stack.validate();
    require(epsilon >= 0.0, "epsilon must be non-negative");
    DirectionalStack out = stack;
    parallel_for(static_cast<int>(stack.maps.size()), n_threads,
                 [&](int i) { out.maps[i] = background_suppress_map(stack.maps[i], epsilon); });
    return out;
}

}  // namespace tsom
