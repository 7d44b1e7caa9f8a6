#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "tsom/common.hpp"
#include "tsom/frame.hpp"
#include "tsom/threading.hpp"

namespace tsom {

// Square odd-sized kernel; weight(u,v) addresses offsets u,v in [-size/2, size/2].
struct SpatialKernel {
    int size = 1;
    std::vector<double> weights;

    int radius() const { return size / 2; }
    double weight(int u, int v) const {
        int r = radius();
        return weights[static_cast<std::size_t>(v + r) * size + (u + r)];
    }
    double& weight(int u, int v) {
        int r = radius();
        return weights[static_cast<std::size_t>(v + r) * size + (u + r)];
    }
    double sum() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }

    void validate() const {
        require(size >= 1 && size % 2 == 1, "kernel size must be odd and positive");
        require(weights.size() == static_cast<std::size_t>(size) * size,
                "kernel weight count must be size*size");
        for (double w : weights) require(std::isfinite(w), "kernel weights must be finite");
    }
};

// All convolutions in this project use the true-convolution orientation
//   out(x,y) = sum_{u,v} in(x-u, y-v) * k(u,v)
// with out-of-range reads clamped to the nearest edge pixel (replicate border).
// Orientation matters for the odd-symmetric kernels because rectification
// follows some stages.

inline Frame convolve_direct(const Frame& in, const SpatialKernel& k) {
    k.validate();
    require(k.size <= in.width && k.size <= in.height, "kernel larger than frame");
    const int r = k.radius();
    Frame out(in.width, in.height);
    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < in.width; ++x) {
            double acc = 0.0;
            for (int v = -r; v <= r; ++v) {
                int yy = y - v;
                if (yy < 0) yy = 0; else if (yy >= in.height) yy = in.height - 1;
                const double* row = &in.data[static_cast<std::size_t>(yy) * in.width];
                const double* wrow = &k.weights[static_cast<std::size_t>(v + r) * k.size];
                for (int u = -r; u <= r; ++u) {
                    int xx = x - u;
                    if (xx < 0) xx = 0; else if (xx >= in.width) xx = in.width - 1;
                    acc += wrow[u + r] * row[xx];
                }
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

namespace detail {

// Horizontal pass of a separable convolution: H(x,y) = sum_u taps[u] * in(x-u, y).
inline void conv_rows(const Frame& in, const std::vector<double>& taps, Frame& out) {
    const int r = static_cast<int>(taps.size()) / 2;
    for (int y = 0; y < in.height; ++y) {
        const double* row = &in.data[static_cast<std::size_t>(y) * in.width];
        double* orow = &out.data[static_cast<std::size_t>(y) * in.width];
        for (int x = 0; x < in.width; ++x) {
            double acc = 0.0;
            for (int u = -r; u <= r; ++u) {
                int xx = x - u;
                if (xx < 0) xx = 0; else if (xx >= in.width) xx = in.width - 1;
                acc += taps[u + r] * row[xx];
            }
            orow[x] = acc;
        }
    }
}

}  // namespace detail

// Separable convolution: kernel k(u,v) = row_taps[u] * col_taps[v].
// Replicate clamping factors per axis, so this matches the 2-D definition.
inline Frame convolve_separable(const Frame& in, const std::vector<double>& row_taps,
                                const std::vector<double>& col_taps) {
    require(row_taps.size() % 2 == 1 && col_taps.size() % 2 == 1, "taps must have odd length");
    require(static_cast<int>(row_taps.size()) <= in.width &&
                static_cast<int>(col_taps.size()) <= in.height,
            "kernel larger than frame");
    Frame h(in.width, in.height);
    detail::conv_rows(in, row_taps, h);
    const int r = static_cast<int>(col_taps.size()) / 2;
    Frame out(in.width, in.height);
    for (int y = 0; y < in.height; ++y) {
        double* orow = &out.data[static_cast<std::size_t>(y) * in.width];
        for (int v = -r; v <= r; ++v) {
            int yy = y - v;
            if (yy < 0) yy = 0; else if (yy >= in.height) yy = in.height - 1;
            const double* hrow = &h.data[static_cast<std::size_t>(yy) * in.width];
            const double t = col_taps[v + r];
            if (v == -r)
                for (int x = 0; x < in.width; ++x) orow[x] = t * hrow[x];
            else
                for (int x = 0; x < in.width; ++x) orow[x] += t * hrow[x];
        }
    }
    return out;
}

// Rank-2 kernel k = rowA⊗colA + scale_b * rowB⊗colB applied in one fused pass.
// Both tap pairs must share one length.
inline Frame convolve_rank2(const Frame& in, const std::vector<double>& row_a,
                            const std::vector<double>& col_a, const std::vector<double>& row_b,
                            const std::vector<double>& col_b, double scale_b) {
    require(row_a.size() == col_a.size() && row_b.size() == col_b.size() &&
                row_a.size() == row_b.size() && row_a.size() % 2 == 1,
            "rank-2 taps must share one odd length");
    require(static_cast<int>(row_a.size()) <= in.width &&
                static_cast<int>(row_a.size()) <= in.height,
            "kernel larger than frame");
    Frame ha(in.width, in.height), hb(in.width, in.height);
    detail::conv_rows(in, row_a, ha);
    detail::conv_rows(in, row_b, hb);
    const int r = static_cast<int>(col_a.size()) / 2;
    Frame out(in.width, in.height);
    std::vector<double> acc_a(in.width), acc_b(in.width);
    for (int y = 0; y < in.height; ++y) {
        std::fill(acc_a.begin(), acc_a.end(), 0.0);
        std::fill(acc_b.begin(), acc_b.end(), 0.0);
        for (int v = -r; v <= r; ++v) {
            int yy = y - v;
            if (yy < 0) yy = 0; else if (yy >= in.height) yy = in.height - 1;
            const double* arow = &ha.data[static_cast<std::size_t>(yy) * in.width];
            const double* brow = &hb.data[static_cast<std::size_t>(yy) * in.width];
            const double ta = col_a[v + r], tb = col_b[v + r];
            for (int x = 0; x < in.width; ++x) {
                acc_a[x] += ta * arow[x];
                acc_b[x] += tb * brow[x];
            }
        }
        double* orow = &out.data[static_cast<std::size_t>(y) * in.width];
        for (int x = 0; x < in.width; ++x) orow[x] = acc_a[x] + scale_b * acc_b[x];
    }
    return out;
}

namespace detail {

// Smallest integer >= n with prime factors in {2,3,5,7}: FFT sizes with large
// prime factors run several times slower.
inline int next_smooth(int n) {
    for (;; ++n) {
        int m = n;
        for (int p : {2, 3, 5, 7})
            while (m % p == 0) m /= p;
        if (m == 1) return n;
    }
}

struct FftPlans {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
};

// Plans are cached per padded size and live for the process lifetime.
// FFTW_ESTIMATE keeps plan selection independent of runtime timing, which is
// required for run-to-run bit-identical outputs; plan creation is serialized
// because FFTW's planner is not thread-safe.
inline const FftPlans& plans_for(int pw, int ph) {
    static std::map<std::pair<int, int>, FftPlans> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({pw, ph});
    if (it != cache.end()) return it->second;
    double* rbuf = fftw_alloc_real(static_cast<std::size_t>(pw) * ph);
    fftw_complex* cbuf = fftw_alloc_complex(static_cast<std::size_t>(pw / 2 + 1) * ph);
    FftPlans p;
    p.fwd = fftw_plan_dft_r2c_2d(ph, pw, rbuf, cbuf, FFTW_ESTIMATE);
    p.inv = fftw_plan_dft_c2r_2d(ph, pw, cbuf, rbuf, FFTW_ESTIMATE);
    fftw_free(rbuf);
    fftw_free(cbuf);
    return cache.emplace(std::make_pair(pw, ph), p).first->second;
}

}  // namespace detail

// FFT realization of convolve_direct for one kernel at one frame size.
// The kernel spectrum is computed once at construction; apply() is const and
// thread-safe (scratch buffers are per call).
class FftKernel {
public:
    FftKernel(const SpatialKernel& k, int frame_w, int frame_h)
        : w_(frame_w), h_(frame_h), r_(k.radius()) {
        k.validate();
        require(k.size <= frame_w && k.size <= frame_h, "kernel larger than frame");
        pw_ = detail::next_smooth(frame_w + 2 * r_);
        ph_ = detail::next_smooth(frame_h + 2 * r_);
        nc_ = pw_ / 2 + 1;
        plans_ = &detail::plans_for(pw_, ph_);
        // Wrapped kernel layout with the DFT normalization folded in.
        double* rbuf = fftw_alloc_real(static_cast<std::size_t>(pw_) * ph_);
        std::fill(rbuf, rbuf + static_cast<std::size_t>(pw_) * ph_, 0.0);
        const double norm = 1.0 / (static_cast<double>(pw_) * ph_);
        for (int v = -r_; v <= r_; ++v)
            for (int u = -r_; u <= r_; ++u)
                rbuf[static_cast<std::size_t>((v + ph_) % ph_) * pw_ + (u + pw_) % pw_] =
                    k.weight(u, v) * norm;
        spectrum_.resize(static_cast<std::size_t>(nc_) * ph_);
        fftw_execute_dft_r2c(plans_->fwd, rbuf,
                             reinterpret_cast<fftw_complex*>(spectrum_.data()));
        fftw_free(rbuf);
    }

    Frame apply(const Frame& in) const {
        require(in.width == w_ && in.height == h_, "frame size does not match kernel plan");
        double* rbuf = fftw_alloc_real(static_cast<std::size_t>(pw_) * ph_);
        fftw_complex* cbuf = fftw_alloc_complex(static_cast<std::size_t>(nc_) * ph_);
        std::fill(rbuf, rbuf + static_cast<std::size_t>(pw_) * ph_, 0.0);
        // Replicate-padded content occupies rows [0, h+2r), cols [0, w+2r).
        for (int j = 0; j < h_ + 2 * r_; ++j) {
            int sy = j - r_;
            if (sy < 0) sy = 0; else if (sy >= h_) sy = h_ - 1;
            const double* src = &in.data[static_cast<std::size_t>(sy) * w_];
            double* dst = &rbuf[static_cast<std::size_t>(j) * pw_];
            for (int i = 0; i < w_ + 2 * r_; ++i) {
                int sx = i - r_;
                if (sx < 0) sx = 0; else if (sx >= w_) sx = w_ - 1;
                dst[i] = src[sx];
            }
        }
        fftw_execute_dft_r2c(plans_->fwd, rbuf, cbuf);
        auto* spec = reinterpret_cast<const double*>(spectrum_.data());
        for (std::size_t i = 0; i < static_cast<std::size_t>(nc_) * ph_; ++i) {
            const double ar = cbuf[i][0], ai = cbuf[i][1];
            const double br = spec[2 * i], bi = spec[2 * i + 1];
            cbuf[i][0] = ar * br - ai * bi;
            cbuf[i][1] = ar * bi + ai * br;
        }
        fftw_execute_dft_c2r(plans_->inv, cbuf, rbuf);
        Frame out(w_, h_);
        for (int y = 0; y < h_; ++y) {
            const double* src = &rbuf[static_cast<std::size_t>(y + r_) * pw_ + r_];
            double* dst = &out.data[static_cast<std::size_t>(y) * w_];
            for (int x = 0; x < w_; ++x) dst[x] = src[x];
        }
        fftw_free(rbuf);
        fftw_free(cbuf);
        return out;
    }

private:
    int w_, h_, r_, pw_, ph_, nc_;
    std::vector<std::complex<double>> spectrum_;
    const detail::FftPlans* plans_;
};

// Convolves frames against a family of same-sized kernels. On the FFT path
// the padded input is transformed once and shared by every kernel (one
// forward plus one inverse transform per kernel).
class ConvBank {
public:
    ConvBank(const std::vector<SpatialKernel>& kernels, int frame_w, int frame_h,
             bool force_direct = false)
        : kernels_(kernels), w_(frame_w), h_(frame_h) {
        require(!kernels.empty(), "bank needs at least one kernel");
        for (const SpatialKernel& k : kernels) {
            k.validate();
            require(k.size == kernels.front().size, "bank kernels must share one size");
        }
        r_ = kernels.front().radius();
        require(kernels.front().size <= frame_w && kernels.front().size <= frame_h,
                "kernel larger than frame");
        use_fft_ = !force_direct && fft_worthwhile_impl(frame_w, frame_h, kernels.front().size);
        if (!use_fft_) return;
        pw_ = detail::next_smooth(frame_w + 2 * r_);
        ph_ = detail::next_smooth(frame_h + 2 * r_);
        nc_ = pw_ / 2 + 1;
        plans_ = &detail::plans_for(pw_, ph_);
        const std::size_t spec_n = static_cast<std::size_t>(nc_) * ph_;
        spectra_.resize(spec_n * kernels.size());
        double* rbuf = fftw_alloc_real(static_cast<std::size_t>(pw_) * ph_);
        const double norm = 1.0 / (static_cast<double>(pw_) * ph_);
        for (std::size_t ki = 0; ki < kernels.size(); ++ki) {
            std::fill(rbuf, rbuf + static_cast<std::size_t>(pw_) * ph_, 0.0);
            for (int v = -r_; v <= r_; ++v)
                for (int u = -r_; u <= r_; ++u)
                    rbuf[static_cast<std::size_t>((v + ph_) % ph_) * pw_ + (u + pw_) % pw_] =
                        kernels[ki].weight(u, v) * norm;
            fftw_execute_dft_r2c(
                plans_->fwd, rbuf,
                reinterpret_cast<fftw_complex*>(spectra_.data() + spec_n * ki));
        }
        fftw_free(rbuf);
    }

    int size() const { return static_cast<int>(kernels_.size()); }

    // out[i] = in convolved with kernels[i] (replicate borders, true
    // convolution). fn(i, frame) consumes results as they are produced.
    template <typename Consumer>
    void apply_all(const Frame& in, int n_threads, Consumer&& consume) const {
        require(in.width == w_ && in.height == h_, "frame size does not match bank");
        if (!use_fft_) {
            parallel_for(size(), n_threads,
                         [&](int i) { consume(i, convolve_direct(in, kernels_[i])); });
            return;
        }
        const std::size_t spec_n = static_cast<std::size_t>(nc_) * ph_;
        double* rbuf = fftw_alloc_real(static_cast<std::size_t>(pw_) * ph_);
        fftw_complex* in_spec = fftw_alloc_complex(spec_n);
        std::fill(rbuf, rbuf + static_cast<std::size_t>(pw_) * ph_, 0.0);
        for (int j = 0; j < h_ + 2 * r_; ++j) {
            int sy = j - r_;
            if (sy < 0) sy = 0; else if (sy >= h_) sy = h_ - 1;
            const double* src = &in.data[static_cast<std::size_t>(sy) * w_];
            double* dst = &rbuf[static_cast<std::size_t>(j) * pw_];
            for (int i = 0; i < w_ + 2 * r_; ++i) {
                int sx = i - r_;
                if (sx < 0) sx = 0; else if (sx >= w_) sx = w_ - 1;
                dst[i] = src[sx];
            }
        }
        fftw_execute_dft_r2c(plans_->fwd, rbuf, in_spec);
        fftw_free(rbuf);
        parallel_for(size(), n_threads, [&](int ki) {
            fftw_complex* cbuf = fftw_alloc_complex(spec_n);
            double* obuf = fftw_alloc_real(static_cast<std::size_t>(pw_) * ph_);
            const double* spec = reinterpret_cast<const double*>(spectra_.data() + spec_n * ki);
            for (std::size_t i = 0; i < spec_n; ++i) {
                const double ar = in_spec[i][0], ai = in_spec[i][1];
                const double br = spec[2 * i], bi = spec[2 * i + 1];
                cbuf[i][0] = ar * br - ai * bi;
                cbuf[i][1] = ar * bi + ai * br;
            }
            fftw_execute_dft_c2r(plans_->inv, cbuf, obuf);
            Frame out(w_, h_);
            for (int y = 0; y < h_; ++y) {
                const double* src = &obuf[static_cast<std::size_t>(y + r_) * pw_ + r_];
                double* dst = &out.data[static_cast<std::size_t>(y) * w_];
                for (int x = 0; x < w_; ++x) dst[x] = src[x];
            }
            fftw_free(cbuf);
            fftw_free(obuf);
            consume(ki, std::move(out));
        });
        fftw_free(in_spec);
    }

private:
    static bool fft_worthwhile_impl(int w, int h, int ksize);

    std::vector<SpatialKernel> kernels_;
    int w_, h_, r_;
    bool use_fft_ = false;
    int pw_ = 0, ph_ = 0, nc_ = 0;
    std::vector<std::complex<double>> spectra_;
    const detail::FftPlans* plans_ = nullptr;
};

// Deterministic backend choice: large frames go through the FFT path, small
// ones (including every unit-test raster) through the direct loops. The rule
// depends only on sizes, so staged and streaming executions agree bit-exactly.
inline bool fft_worthwhile(int frame_w, int frame_h, int kernel_size) {
    return static_cast<long>(frame_w) * frame_h >= 256L * 256L && kernel_size >= 5;
}

inline bool ConvBank::fft_worthwhile_impl(int w, int h, int ksize) {
    return fft_worthwhile(w, h, ksize);
}

// One kernel bound to one frame size with the backend frozen at construction.
class FrameConvolver {
public:
    FrameConvolver(const SpatialKernel& k, int frame_w, int frame_h) {
        if (fft_worthwhile(frame_w, frame_h, k.size))
            fft_.emplace(k, frame_w, frame_h);
        else
            kernel_ = k;
    }

    Frame operator()(const Frame& in) const {
        return fft_ ? fft_->apply(in) : convolve_direct(in, kernel_);
    }

private:
    std::optional<FftKernel> fft_;
    SpatialKernel kernel_;
};

// One-shot convenience entry with the same backend rule.
inline Frame convolve(const Frame& in, const SpatialKernel& k) {
    return FrameConvolver(k, in.width, in.height)(in);
}

// If k is an outer product row⊗col (within 1e-12 of its largest weight),
// returns the factor taps; otherwise empty. Lets isotropic-Gaussian stages
// run the fast separable path without weakening the general-kernel contract.
inline std::optional<std::pair<std::vector<double>, std::vector<double>>> rank1_factors(
    const SpatialKernel& k) {
    const int r = k.radius();
    int pu = 0, pv = 0;
    double pivot = 0.0;
    for (int v = -r; v <= r; ++v)
        for (int u = -r; u <= r; ++u)
            if (std::abs(k.weight(u, v)) > std::abs(pivot)) {
                pivot = k.weight(u, v);
                pu = u;
                pv = v;
            }
    if (pivot == 0.0) return std::nullopt;
    std::vector<double> row(k.size), col(k.size);
    for (int u = -r; u <= r; ++u) row[u + r] = k.weight(u, pv);
    for (int v = -r; v <= r; ++v) col[v + r] = k.weight(pu, v) / pivot;
    for (int v = -r; v <= r; ++v)
        for (int u = -r; u <= r; ++u)
            if (std::abs(k.weight(u, v) - row[u + r] * col[v + r]) > 1e-12 * std::abs(pivot))
                return std::nullopt;
    return std::make_pair(std::move(row), std::move(col));
}

}  // namespace tsom
