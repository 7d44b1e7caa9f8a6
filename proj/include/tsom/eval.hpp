#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tsom/common.hpp"
#include "tsom/frame.hpp"
#include "tsom/image_io.hpp"
#include "tsom/pipeline.hpp"
#include "tsom/retina.hpp"
#include "tsom/rt.hpp"
#include "tsom/synth.hpp"

namespace tsom {

struct MatchResult {
    long long true_positives = 0;
    long long false_positives = 0;
    long long actual_objects = 0;
    long long n_frames = 0;
};

namespace detail {

struct FrameMatchInput {
    std::vector<std::pair<double, double>> gts;  // ground-truth centers
    std::vector<Detection> dets;
};

}  // namespace detail

// Greedy nearest-first matching: per frame, candidate (gt, detection) pairs
// within the inclusive distance threshold are committed in order of
// increasing distance (ties: higher detection score, then detection order).
// Each ground-truth object takes at most one detection; leftover detections
// are false positives. The evaluated frame window defaults to the span of
// the detections' frame indices; pass t_begin/n_frames to pin it explicitly
// (frames with no detections still count toward F_A's denominator).
inline MatchResult match_detections(const std::vector<Detection>& detections,
                                    const GroundTruth& gt, double dist_threshold = 5.0,
                                    int t_begin = -1, int n_frames = -1) {
    require(dist_threshold >= 0.0, "distance threshold must be non-negative");
    require(!gt.entries.empty(), "ground truth is empty");
    int gt_min = gt.entries.front().frame, gt_max = gt.entries.front().frame;
    for (const auto& e : gt.entries) {
        gt_min = std::min(gt_min, e.frame);
        gt_max = std::max(gt_max, e.frame);
    }
    for (const Detection& d : detections)
        require(d.t >= gt_min && d.t <= gt_max, "detection frame outside ground-truth range");
    if (t_begin < 0) {
        if (detections.empty()) return MatchResult{};
        int lo = detections.front().t, hi = detections.front().t;
        for (const Detection& d : detections) {
            lo = std::min(lo, d.t);
            hi = std::max(hi, d.t);
        }
        t_begin = lo;
        n_frames = hi - lo + 1;
    }
    require(n_frames >= 1, "n_frames must be positive");

    std::map<int, detail::FrameMatchInput> frames;
    for (const auto& e : gt.entries)
        if (e.frame >= t_begin && e.frame < t_begin + n_frames)
            frames[e.frame].gts.emplace_back(e.x, e.y);
    MatchResult result;
    result.n_frames = n_frames;
    for (const auto& [t, fr] : frames) result.actual_objects += fr.gts.size();

    for (const Detection& d : detections) {
        require(d.t >= t_begin && d.t < t_begin + n_frames,
                "detection outside the evaluated frame window");
        frames[d.t].dets.push_back(d);
    }

    for (auto& [t, fr] : frames) {
        struct Cand {
            double dist;
            double score;
            std::size_t det, gt;
        };
        std::vector<Cand> cands;
        for (std::size_t di = 0; di < fr.dets.size(); ++di)
            for (std::size_t gi = 0; gi < fr.gts.size(); ++gi) {
                const double dx = fr.dets[di].x - fr.gts[gi].first;
                const double dy = fr.dets[di].y - fr.gts[gi].second;
                const double dist = std::sqrt(dx * dx + dy * dy);
                if (dist <= dist_threshold) cands.push_back({dist, fr.dets[di].score, di, gi});
            }
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            if (a.dist != b.dist) return a.dist < b.dist;
            if (a.score != b.score) return a.score > b.score;
            if (a.det != b.det) return a.det < b.det;
            return a.gt < b.gt;
        });
        std::vector<bool> det_used(fr.dets.size(), false), gt_used(fr.gts.size(), false);
        long long matched = 0;
        for (const Cand& c : cands) {
            if (det_used[c.det] || gt_used[c.gt]) continue;
            det_used[c.det] = true;
            gt_used[c.gt] = true;
            ++matched;
        }
        result.true_positives += matched;
        result.false_positives += static_cast<long long>(fr.dets.size()) - matched;
    }
    return result;
}

// Detection rate and false-alarm rate:
//   D_R = TP / actual objects,  F_A = FP / frames.
inline std::pair<double, double> metrics(const MatchResult& r) {
    require(r.actual_objects > 0, "no ground-truth objects in the evaluated window");
    require(r.n_frames > 0, "no evaluated frames");
    return {static_cast<double>(r.true_positives) / r.actual_objects,
            static_cast<double>(r.false_positives) / r.n_frames};
}

struct RocCurve {
    std::vector<double> thresholds;                 // descending
    std::vector<std::pair<double, double>> points;  // (f_a, d_r) per threshold
};

// ROC sweep: for each threshold, detections = top_k strict maxima above that
// floor (equivalent to running detect() per threshold; maxima are extracted
// once and re-cut per floor), matched against ground truth over the maps'
// frame window.
inline RocCurve roc(const std::vector<Frame>& score_maps, int t_begin, const GroundTruth& gt,
                    std::vector<double> thresholds, int top_k) {
    require(!thresholds.empty(), "thresholds must be non-empty");
    require(!score_maps.empty(), "score maps must be non-empty");
    require(top_k >= 1, "top_k must be positive");
    std::sort(thresholds.rbegin(), thresholds.rend());
    const int n_frames = static_cast<int>(score_maps.size());

    // Per frame, maxima sorted by the detection order (score desc, y, x).
    std::vector<std::vector<Detection>> maxima(score_maps.size());
    for (std::size_t ti = 0; ti < score_maps.size(); ++ti) {
        maxima[ti] = detail::strict_maxima(score_maps[ti],
                                           -std::numeric_limits<double>::infinity());
        std::sort(maxima[ti].begin(), maxima[ti].end(), detail::detection_order);
        for (Detection& d : maxima[ti]) d.t = t_begin + static_cast<int>(ti);
    }

    RocCurve curve;
    curve.thresholds = thresholds;
    for (double thr : thresholds) {
        std::vector<Detection> dets;
        for (const auto& frame_maxima : maxima) {
            int taken = 0;
            for (const Detection& d : frame_maxima) {
                if (!(d.score > thr) || taken >= top_k) break;
                dets.push_back(d);
                ++taken;
            }
        }
        const MatchResult r = match_detections(dets, gt, 5.0, t_begin, n_frames);
        if (r.actual_objects == 0) {
            curve.points.emplace_back(0.0, 0.0);
            continue;
        }
        const auto [dr, fa] = metrics(r);
        curve.points.emplace_back(fa, dr);
    }
    return curve;
}

// Classical comparison detector: per-step score map |frame_t - frame_{t-1}|
// smoothed with the retina Gaussian, localized by the same strict-maxima
// rule as the main pipeline. Maps cover source frames [1, T).
struct BaselineResult {
    int t_begin = 1;
    std::vector<Frame> score_maps;
    std::vector<Detection> detections;
};

inline BaselineResult frame_difference_baseline(const Sequence& seq, int top_k,
                                                double smooth_sigma = 1.0,
                                                int smooth_size = 5) {
    seq.validate();
    require(seq.length() >= 2, "need at least two frames");
    const SpatialKernel k = gaussian_kernel(smooth_sigma, smooth_size);
    BaselineResult out;
    out.score_maps.reserve(seq.length() - 1);
    for (int t = 1; t < seq.length(); ++t) {
        Frame diff(seq.width(), seq.height());
        const Frame& a = seq.frames[t - 1];
        const Frame& b = seq.frames[t];
        for (std::size_t i = 0; i < diff.size(); ++i) diff.data[i] = std::abs(b.data[i] - a.data[i]);
        out.score_maps.push_back(retina_frame(diff, k));
    }
    out.detections = detect(out.score_maps, out.t_begin, top_k, 0.0);
    return out;
}

enum class SweepParameter { radius, v_a, luminance, v_b, theta_bg };

inline const char* sweep_parameter_name(SweepParameter p) {
    switch (p) {
        case SweepParameter::radius: return "radius";
        case SweepParameter::v_a: return "va";
        case SweepParameter::luminance: return "luminance";
        case SweepParameter::v_b: return "vb";
        case SweepParameter::theta_bg: return "theta";
    }
    return "unknown";
}

// Responses are read from the direction channel tuned to the object's heading
// (a tuning curve tracks one unit across the stimulus sweep; taking the
// per-point best channel would splice different units into one curve).
struct SweepPoint {
    double value = 0.0;
    double soma_response = 0.0;  // mean heading-channel soma energy at ground truth
    double rt_response = 0.0;    // mean heading-channel normalized energy at ground truth
    double precision = 0.0;      // fraction of frames localized within 5 px
};

struct SweepOptions {
    int response_frames = 20;   // clip length for the response curves
    bool measure_response = true;
    bool measure_precision = true;
    int n_threads = 1;
};

namespace detail {

inline void apply_sweep_value(SynthConfig& c, SweepParameter p, double value) {
    switch (p) {
        case SweepParameter::radius: c.radius = value; break;
        case SweepParameter::v_a: c.v_a = value; break;
        case SweepParameter::luminance: c.luminance = value; break;
        case SweepParameter::v_b: c.v_b = value; break;
        case SweepParameter::theta_bg: c.theta_bg = value; break;
    }
}

inline std::vector<std::pair<int, int>> probe_points(const GroundTruth& gt) {
    std::vector<std::pair<int, int>> pts(gt.entries.size());
    for (const auto& e : gt.entries) pts[e.frame] = {e.x, e.y};
    return pts;
}

// Index of the direction channel whose orientation is closest to the given
// heading (orientations sample [0, pi); headings wrap modulo pi).
inline int heading_channel(double theta, int n_directions) {
    const double step = kPi / n_directions;
    double wrapped = std::fmod(theta, kPi);
    if (wrapped < 0.0) wrapped += kPi;
    return static_cast<int>(std::llround(wrapped / step)) % n_directions;
}

}  // namespace detail

// Parameter sweep: for each value, synthesize the scene and record the layer
// responses at the ground-truth pixel (on a short clip) and the top-1
// localization precision under the 5-px rule (on the full trial length).
inline std::vector<SweepPoint> tuning_sweep(SweepParameter param,
                                            const std::vector<double>& values,
                                            const SynthConfig& base,
                                            const PipelineConfig& pipeline_config,
                                            const SweepOptions& opts = {}) {
    require(!values.empty(), "sweep values must be non-empty");
    pipeline_config.validate();
    std::vector<SweepPoint> curve;
    curve.reserve(values.size());
    for (double value : values) {
        SweepPoint point;
        point.value = value;
        if (opts.measure_response) {
            SynthConfig c = base;
            detail::apply_sweep_value(c, param, value);
            c.n_frames = opts.response_frames;
            auto [seq, gt] = generate(c);
            const auto probes = detail::probe_points(gt);
            RunOptions ro;
            ro.n_threads = opts.n_threads;
            ro.probe = &probes;
            const PipelineRun run = run_pipeline(seq, pipeline_config, ro);
            require(!run.probes.empty(), "probe run produced no interior frames");
            const int dch = detail::heading_channel(c.theta_obj, pipeline_config.n_directions);
            for (const ProbeRecord& rec : run.probes) {
                point.soma_response += rec.s_theta[dch];
                point.rt_response += rec.e_theta[dch];
            }
            point.soma_response /= run.probes.size();
            point.rt_response /= run.probes.size();
        }
        if (opts.measure_precision) {
            SynthConfig c = base;
            detail::apply_sweep_value(c, param, value);
            auto [seq, gt] = generate(c);
            PipelineConfig pc = pipeline_config;
            pc.top_k = 1;
            pc.score_floor = 0.0;
            RunOptions ro;
            ro.n_threads = opts.n_threads;
            const PipelineRun run = run_pipeline(seq, pc, ro);
            std::vector<int> hit(seq.length(), 0);
            for (const Detection& d : run.detections) {
                const auto& e = gt.entries[d.t];
                const double dx = d.x - e.x, dy = d.y - e.y;
                if (std::sqrt(dx * dx + dy * dy) <= 5.0) hit[d.t] = 1;
            }
            int hits = 0;
            for (int t = run.t_begin; t < run.t_begin + run.n_times; ++t) hits += hit[t];
            point.precision = run.n_times > 0 ? static_cast<double>(hits) / run.n_times : 0.0;
        }
        curve.push_back(point);
    }
    return curve;
}

// ---- CSV plumbing ----------------------------------------------------------

inline void write_detections_csv(const std::vector<Detection>& dets, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot write detections: " + path);
    std::fprintf(f, "frame,x,y,score\n");
    for (const Detection& d : dets)
        std::fprintf(f, "%d,%d,%d,%.17g\n", d.t, d.x, d.y, d.score);
    std::fclose(f);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace detail

inline std::vector<Detection> read_detections_csv(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "r");
    if (!f) throw IoError("cannot read detections: " + path);
    std::vector<Detection> dets;
    char buf[512];
    int line_no = 0;
    while (std::fgets(buf, sizeof(buf), f)) {
        ++line_no;
        std::string line(buf);
        while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (line_no == 1 && !fields.empty() && fields[0] == "frame") continue;  // header
        if (fields.size() != 4) {
            std::fclose(f);
            throw IoError("malformed detection row in " + path + " line " +
                          std::to_string(line_no));
        }
        try {
            dets.push_back(Detection{std::stoi(fields[1]), std::stoi(fields[2]),
                                     std::stoi(fields[0]), std::stod(fields[3])});
        } catch (const std::exception&) {
            std::fclose(f);
            throw IoError("malformed detection row in " + path + " line " +
                          std::to_string(line_no));
        }
    }
    std::fclose(f);
    return dets;
}

inline GroundTruth read_ground_truth_csv(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "r");
    if (!f) throw IoError("cannot read ground truth: " + path);
    GroundTruth gt;
    char buf[512];
    int line_no = 0;
    while (std::fgets(buf, sizeof(buf), f)) {
        ++line_no;
        std::string line(buf);
        while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (line_no == 1 && !fields.empty() && fields[0] == "frame") continue;
        if (fields.size() != 3) {
            std::fclose(f);
            throw IoError("malformed ground-truth row in " + path + " line " +
                          std::to_string(line_no));
        }
        try {
            gt.entries.push_back(
                {std::stoi(fields[0]), std::stoi(fields[1]), std::stoi(fields[2])});
        } catch (const std::exception&) {
            std::fclose(f);
            throw IoError("malformed ground-truth row in " + path + " line " +
                          std::to_string(line_no));
        }
    }
    std::fclose(f);
    return gt;
}

inline void write_roc_csv(const RocCurve& curve, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot write ROC: " + path);
    std::fprintf(f, "fa,dr\n");
    for (const auto& [fa, dr] : curve.points) std::fprintf(f, "%.17g,%.17g\n", fa, dr);
    std::fclose(f);
}

inline void write_sweep_csv(const std::vector<SweepPoint>& curve, const std::string& path,
                            bool with_response = true, bool with_precision = true) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot write sweep: " + path);
    std::fprintf(f, "value");
    if (with_response) std::fprintf(f, ",soma_response,rt_response");
    if (with_precision) std::fprintf(f, ",precision");
    std::fprintf(f, "\n");
    for (const SweepPoint& p : curve) {
        std::fprintf(f, "%.17g", p.value);
        if (with_response) std::fprintf(f, ",%.17g,%.17g", p.soma_response, p.rt_response);
        if (with_precision) std::fprintf(f, ",%.17g", p.precision);
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

// Loader for externally obtained benchmark sequences in the synth layout:
// a directory of numbered PNG frames plus a frame,x,y ground-truth CSV.
struct LabeledSequence {
    Sequence seq;
    GroundTruth gt;
};

inline LabeledSequence load_labeled_sequence(const std::string& frames_dir,
                                             const std::string& gt_csv, double fps = 50.0) {
    LabeledSequence out;
    out.seq = load_sequence(frames_dir, fps);
    out.gt = read_ground_truth_csv(gt_csv);
    require(!out.gt.entries.empty(), "ground truth is empty");
    return out;
}

}  // namespace tsom
