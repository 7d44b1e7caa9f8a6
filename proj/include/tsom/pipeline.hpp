#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "tsom/common.hpp"
#include "tsom/config.hpp"
#include "tsom/convolve.hpp"
#include "tsom/dendrite.hpp"
#include "tsom/frame.hpp"
#include "tsom/retina.hpp"
#include "tsom/rt.hpp"
#include "tsom/soma.hpp"
#include "tsom/threading.hpp"

namespace tsom {

// Per-frame layer views handed to the debug tap: the smoothed input, the
// channel-maximum magnitudes of the dendritic and soma stages, and the final
// combined output map.
struct StageSnapshot {
    int t = 0;
    const Frame* retina = nullptr;
    Frame dendrite_mag;
    Frame soma_mag;
    const Frame* output = nullptr;
};

// Layer responses sampled at one pixel per frame (typically ground truth).
struct ProbeRecord {
    int t = 0;
    double soma_pre = 0.0;          // max over channels of S' at the pixel
    double soma = 0.0;              // max over channels of S
    std::vector<double> s_theta;    // soma-stage energy per direction (phase-pair norm)
    std::vector<double> e_theta;    // normalized energy per direction
    double output = 0.0;            // combined map O
};

struct RunOptions {
    int n_threads = 1;
    bool keep_output = false;  // retain every O map (memory: frames x W x H)
    // Probe pixels indexed by source frame; nullptr disables probing.
    const std::vector<std::pair<int, int>>* probe = nullptr;
    std::function<void(const StageSnapshot&)> tap;
};

struct PipelineRun {
    int t_begin = 0;
    int n_times = 0;
    std::vector<Detection> detections;
    std::vector<Frame> output_maps;
    std::vector<ProbeRecord> probes;
};

// End-to-end streaming execution of the four-stage pipeline. Holds only a
// three-slice ring of convolved maps, so arbitrarily long sequences run in
// constant memory (plus retained outputs if requested). Every per-slice stage
// call is shared with the staged per-stage API, so for identical inputs this
// runner and the staged path produce bit-identical maps and detections.
inline PipelineRun run_pipeline(const Sequence& seq, const PipelineConfig& config,
                                const RunOptions& opts = {}) {
    config.validate();
    seq.validate();
    const TemporalKernel tk = temporal_kernel();
    const int tr = tk.radius();
    const int window = static_cast<int>(tk.taps.size());
    require(seq.length() >= window, "sequence shorter than the temporal tap count");
    require(config.kernel_size <= seq.width() && config.kernel_size <= seq.height(),
            "kernel larger than frame");
    require(config.retina_kernel_size <= seq.width() &&
                config.retina_kernel_size <= seq.height(),
            "retina kernel larger than frame");
    if (opts.probe)
        require(static_cast<int>(opts.probe->size()) >= seq.length(),
                "probe list shorter than the sequence");

    const SpatialKernel retina_k = gaussian_kernel(config.sigma1, config.retina_kernel_size);
    const auto retina_factors = rank1_factors(retina_k);
    const std::vector<GaborKernel> bank = gabor_bank(config);
    const ConvBank convs(bank_kernels(bank), seq.width(), seq.height());
    const ScaleKernel sk = scale_kernel(config.soma_a, config.soma_mu, config.kernel_size);
    const std::vector<double> alpha = config.resolved_alpha();
    const int nd = config.n_directions;
    const int nj = nd * 2;
    const int w = seq.width(), h = seq.height();

    PipelineRun run;
    run.t_begin = tr;
    run.n_times = seq.length() - 2 * tr;

    std::vector<Frame> ring(static_cast<std::size_t>(window) * nj);
    std::vector<Frame> smoothed_ring(window);
    const bool need_d = static_cast<bool>(opts.tap);
    const bool need_sprime = static_cast<bool>(opts.probe);
    std::vector<Frame> d_maps(need_d ? nj : 0);
    std::vector<Frame> sprime(need_sprime ? nj : 0);
    std::vector<Frame> s_maps(nj), eprime(nd);

    for (int t = 0; t < seq.length(); ++t) {
        smoothed_ring[t % window] = detail::retina_apply(seq.frames[t], retina_k, retina_factors);
        convs.apply_all(smoothed_ring[t % window], opts.n_threads, [&](int j, Frame&& out) {
            ring[static_cast<std::size_t>(t % window) * nj + j] = std::move(out);
        });
        if (t < 2 * tr) continue;
        const int tc = t - tr;

        // Dendrite and soma stages per channel.
        parallel_for(nj, opts.n_threads, [&](int j) {
            std::vector<const Frame*> slices(window);
            for (int k = -tr; k <= tr; ++k)
                slices[k + tr] = &ring[static_cast<std::size_t>((tc + k) % window) * nj + j];
            Frame d = temporal_combine(tk, slices);
            Frame sp = scale_select_map(d, sk);
            s_maps[j] = background_suppress_map(sp, config.zscore_epsilon);
            if (need_d) d_maps[j] = std::move(d);
            if (need_sprime) sprime[j] = std::move(sp);
        });

        // Rt stage.
        parallel_for(nd, opts.n_threads,
                     [&](int d) { eprime[d] = motion_energy_map(s_maps[2 * d], s_maps[2 * d + 1]); });
        std::vector<const Frame*> slice(nd);
        for (int d = 0; d < nd; ++d) slice[d] = &eprime[d];
        const std::vector<Frame> e = flicker_normalize_slice(slice);
        for (int d = 0; d < nd; ++d) slice[d] = &e[d];
        Frame o = pool_combine_slice(slice, alpha, config.pool_size);

        for (Detection& det : detect_frame(o, tc, config.top_k, config.score_floor))
            run.detections.push_back(det);

        if (opts.probe) {
            const auto [px, py] = (*opts.probe)[tc];
            require(px >= 0 && px < w && py >= 0 && py < h, "probe pixel outside the frame");
            ProbeRecord rec;
            rec.t = tc;
            for (int j = 0; j < nj; ++j) {
                rec.soma_pre = std::max(rec.soma_pre, sprime[j].at(px, py));
                rec.soma = std::max(rec.soma, s_maps[j].at(px, py));
            }
            rec.s_theta.resize(nd);
            rec.e_theta.resize(nd);
            for (int d = 0; d < nd; ++d) {
                rec.s_theta[d] =
                    std::hypot(s_maps[2 * d].at(px, py), s_maps[2 * d + 1].at(px, py));
                rec.e_theta[d] = e[d].at(px, py);
            }
            rec.output = o.at(px, py);
            run.probes.push_back(std::move(rec));
        }

        if (opts.tap) {
            StageSnapshot snap;
            snap.t = tc;
            snap.retina = &smoothed_ring[tc % window];
            snap.dendrite_mag = Frame(w, h);
            snap.soma_mag = Frame(w, h);
            for (int j = 0; j < nj; ++j)
                for (std::size_t i = 0; i < snap.dendrite_mag.size(); ++i) {
                    snap.dendrite_mag.data[i] =
                        std::max(snap.dendrite_mag.data[i], std::abs(d_maps[j].data[i]));
                    snap.soma_mag.data[i] = std::max(snap.soma_mag.data[i], s_maps[j].data[i]);
                }
            snap.output = &o;
            opts.tap(snap);
        }

        if (opts.keep_output) run.output_maps.push_back(std::move(o));
    }
    return run;
}

}  // namespace tsom
