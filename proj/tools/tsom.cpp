// tsom — command-line driver for the small-target motion detection library.
//
// Subcommands:
//   detect          run the four-stage pipeline on a PNG sequence
//   synth           render a synthetic moving-target scene (or a named
//                   benchmark scenario) with ground truth
//   eval            score a detections CSV against ground truth
//   tune            parameter sweeps: layer response and localization
//                   precision versus radius / speeds / luminance / direction
//   circuit-verify  Monte Carlo check of the two-stage projection inequality
//
// Every run writes a manifest.json (resolved config, inputs, output
// checksums, seed, threads, duration) sufficient to reproduce it.
// Exit codes: 0 ok, 1 usage, 2 I/O, 3 validation, 4 property violation.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <zlib.h>

#include "tsom/tsom.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint32_t file_crc32(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw tsom::IoError("cannot checksum " + path);
    uLong crc = crc32(0L, Z_NULL, 0);
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        crc = crc32(crc, reinterpret_cast<const Bytef*>(buf),
                    static_cast<uInt>(in.gcount()));
    return static_cast<std::uint32_t>(crc);
}

// Collects run metadata and writes <out>/manifest.json on finish().
class Manifest {
  public:
    Manifest(std::string command, std::string out_dir)
        : out_dir_(std::move(out_dir)), start_(std::chrono::steady_clock::now()) {
        j_["command"] = std::move(command);
        j_["inputs"] = json::array();
        j_["outputs"] = json::array();
        fs::create_directories(out_dir_);
    }
    void set_config(json config) { j_["config"] = std::move(config); }
    void set_seed(std::uint64_t seed) { j_["seed"] = seed; }
    void set_threads(int threads) { j_["threads"] = threads; }
    void add_input(const std::string& path) { j_["inputs"].push_back(path); }
    void add_output(const std::string& path) {
        char hex[16];
        std::snprintf(hex, sizeof(hex), "%08x", file_crc32(path));
        j_["outputs"].push_back({{"path", path}, {"crc32", hex}});
    }
    std::string path_in_out(const std::string& name) const {
        return (fs::path(out_dir_) / name).string();
    }
    void finish() {
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        j_["duration_seconds"] =
            std::chrono::duration_cast<std::chrono::duration<double>>(elapsed).count();
        std::ofstream out(path_in_out("manifest.json"));
        if (!out) throw tsom::IoError("cannot write manifest in " + out_dir_);
        out << j_.dump(2) << "\n";
    }

  private:
    json j_;
    std::string out_dir_;
    std::chrono::steady_clock::time_point start_;
};

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw tsom::IoError("cannot read config: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw tsom::ValidationError("config parse error in " + path + ": " + e.what());
    }
}

int resolve_threads(int requested) {
    return requested > 0 ? requested : tsom::default_thread_count();
}

// ---- synth config (JSON) ---------------------------------------------------

// Scene config as JSON. "background" may be a PNG path, an object
// {"width","height","seed"} for the procedural texture, or absent — then a
// texture sized to cover the full scroll is generated from the run seed.
struct SynthSpec {
    tsom::SynthConfig config;  // background filled by resolve_background
    json background;           // original background spec (or null)
};

SynthSpec parse_synth_spec(const json& j) {
    static const char* known[] = {"frame_size", "n_frames", "fps",       "va",
                                  "vb",         "theta_obj", "theta_bg", "radius",
                                  "luminance",  "start_x",   "start_y",  "bounce",
                                  "background"};
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw tsom::ValidationError("unknown scene config key: " + key);
    }
    SynthSpec spec;
    tsom::SynthConfig& c = spec.config;
    c.frame_size = j.value("frame_size", c.frame_size);
    c.n_frames = j.value("n_frames", c.n_frames);
    c.fps = j.value("fps", c.fps);
    c.v_a = j.value("va", c.v_a);
    c.v_b = j.value("vb", c.v_b);
    c.theta_obj = j.value("theta_obj", c.theta_obj);
    c.theta_bg = j.value("theta_bg", c.theta_bg);
    c.radius = j.value("radius", c.radius);
    c.luminance = j.value("luminance", c.luminance);
    c.start_x = j.value("start_x", c.start_x);
    c.start_y = j.value("start_y", c.start_y);
    c.bounce = j.value("bounce", c.bounce);
    spec.background = j.value("background", json());
    return spec;
}

json synth_config_to_json(const tsom::SynthConfig& c, const json& background) {
    return json{{"frame_size", c.frame_size}, {"n_frames", c.n_frames},
                {"fps", c.fps},               {"va", c.v_a},
                {"vb", c.v_b},                {"theta_obj", c.theta_obj},
                {"theta_bg", c.theta_bg},     {"radius", c.radius},
                {"luminance", c.luminance},   {"start_x", c.start_x},
                {"start_y", c.start_y},       {"bounce", c.bounce},
                {"background", background}};
}

// Smallest procedural-background extent covering the whole scroll.
std::pair<int, int> background_dims(const tsom::SynthConfig& c) {
    const double travel = (c.n_frames - 1) * c.v_b / c.fps;
    const int bw = std::max<int>(
        64, c.frame_size + static_cast<int>(std::ceil(travel * std::abs(std::cos(c.theta_bg)))) + 2);
    const int bh = std::max<int>(
        64, c.frame_size + static_cast<int>(std::ceil(travel * std::abs(std::sin(c.theta_bg)))) + 2);
    return {bw, bh};
}

// Fills spec.config.background; returns the resolved background description
// for the manifest. `manifest` may be null (no input recording needed).
json resolve_background(SynthSpec& spec, std::uint64_t seed, Manifest* manifest) {
    if (spec.background.is_string()) {
        const std::string path = spec.background.get<std::string>();
        spec.config.background = std::make_shared<tsom::Frame>(tsom::load_png(path));
        if (manifest) manifest->add_input(path);
        return spec.background;
    }
    int bw = 0, bh = 0;
    std::uint64_t bg_seed = seed;
    if (spec.background.is_object()) {
        for (const auto& [key, value] : spec.background.items())
            if (key != "width" && key != "height" && key != "seed")
                throw tsom::ValidationError("unknown background key: " + key);
        bw = spec.background.value("width", 0);
        bh = spec.background.value("height", 0);
        bg_seed = spec.background.value("seed", seed);
        if (bw <= 0 || bh <= 0)
            throw tsom::ValidationError("background width/height must be positive");
    } else if (spec.background.is_null()) {
        std::tie(bw, bh) = background_dims(spec.config);
    } else {
        throw tsom::ValidationError("background must be a path, an object, or absent");
    }
    spec.config.background =
        std::make_shared<tsom::Frame>(tsom::make_aerial_background(bw, bh, bg_seed));
    return json{{"width", bw}, {"height", bh}, {"seed", bg_seed}};
}

// ---- detect ----------------------------------------------------------------

struct DetectArgs {
    std::string input, config_path, out_dir = "detect_out", gt_path;
    int threads = 0, top_k = -1, roc_top_k = 10;
    double floor = std::numeric_limits<double>::quiet_NaN(), fps = 50.0;
    bool save_maps = false, save_overlays = false, do_roc = false;
};

int run_detect(const DetectArgs& a) {
    Manifest manifest("detect", a.out_dir);
    tsom::PipelineConfig config;
    if (!a.config_path.empty()) {
        config = load_json_file(a.config_path).get<tsom::PipelineConfig>();
        manifest.add_input(a.config_path);
    }
    if (a.top_k > 0) config.top_k = a.top_k;
    if (!std::isnan(a.floor)) config.score_floor = a.floor;
    config.validate();
    manifest.set_config(json(config));
    const int threads = resolve_threads(a.threads);
    manifest.set_threads(threads);
    manifest.set_seed(0);
    manifest.add_input(a.input);

    const tsom::Sequence seq = tsom::load_sequence(a.input, a.fps);

    tsom::RunOptions opts;
    opts.n_threads = threads;
    opts.keep_output = a.do_roc;
    std::vector<std::string> map_files;
    if (a.save_maps) {
        fs::create_directories(fs::path(a.out_dir) / "maps");
        opts.tap = [&](const tsom::StageSnapshot& snap) {
            char name[64];
            const auto save = [&](const char* layer, const tsom::Frame& f) {
                std::snprintf(name, sizeof(name), "maps/%s_%04d.png", layer, snap.t);
                const std::string path = manifest.path_in_out(name);
                tsom::save_map(f, path);
                map_files.push_back(path);
            };
            save("retina", *snap.retina);
            save("dendrite", snap.dendrite_mag);
            save("soma", snap.soma_mag);
            save("rt", *snap.output);
        };
    }
    const tsom::PipelineRun run = tsom::run_pipeline(seq, config, opts);

    const std::string det_path = manifest.path_in_out("detections.csv");
    tsom::write_detections_csv(run.detections, det_path);
    manifest.add_output(det_path);
    for (const std::string& p : map_files) manifest.add_output(p);

    if (a.save_overlays) {
        fs::create_directories(fs::path(a.out_dir) / "overlays");
        for (int t = run.t_begin; t < run.t_begin + run.n_times; ++t) {
            std::vector<tsom::Detection> here;
            for (const tsom::Detection& d : run.detections)
                if (d.t == t) here.push_back(d);
            const tsom::Frame f = tsom::overlay_detections(seq.frames[t], here);
            char name[64];
            std::snprintf(name, sizeof(name), "overlays/frame_%04d.png", t);
            const std::string path = manifest.path_in_out(name);
            tsom::save_frame(f, path);
            manifest.add_output(path);
        }
    }

    std::printf("frames=%d interior=[%d,%d] detections=%zu\n", seq.length(), run.t_begin,
                run.t_begin + run.n_times - 1, run.detections.size());

    if (!a.gt_path.empty()) {
        manifest.add_input(a.gt_path);
        const tsom::GroundTruth gt = tsom::read_ground_truth_csv(a.gt_path);
        const tsom::MatchResult r =
            tsom::match_detections(run.detections, gt, 5.0, run.t_begin, run.n_times);
        const auto [dr, fa] = tsom::metrics(r);
        std::printf("D_R=%.4f F_A=%.4f\n", dr, fa);
        if (a.do_roc) {
            // Thresholds: the distinct local-maxima scores (downsampled), so
            // the curve passes through every achievable operating point.
            std::vector<double> scores;
            for (const tsom::Frame& m : run.output_maps)
                for (const tsom::Detection& d : tsom::detail::strict_maxima(m, 0.0))
                    scores.push_back(d.score);
            std::sort(scores.begin(), scores.end());
            scores.erase(std::unique(scores.begin(), scores.end()), scores.end());
            std::vector<double> thresholds{0.0};
            const std::size_t max_pts = 256;
            const std::size_t stride = std::max<std::size_t>(1, scores.size() / max_pts);
            for (std::size_t i = 0; i < scores.size(); i += stride)
                thresholds.push_back(scores[i]);
            const tsom::RocCurve curve =
                tsom::roc(run.output_maps, run.t_begin, gt, thresholds, a.roc_top_k);
            const std::string roc_path = manifest.path_in_out("roc.csv");
            tsom::write_roc_csv(curve, roc_path);
            manifest.add_output(roc_path);
        }
    }
    manifest.finish();
    return 0;
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
    std::string config_path, out_dir = "synth_out", scenario;
    std::uint64_t seed = 0;
    bool list_scenarios = false;
};

int run_synth(const SynthArgs& a) {
    if (a.list_scenarios) {
        for (const auto& [config, name] : tsom::bevs_suite(nullptr, a.seed))
            std::printf("%s\n", name.c_str());
        return 0;
    }
    Manifest manifest("synth", a.out_dir);
    manifest.set_seed(a.seed);
    manifest.set_threads(1);

    SynthSpec spec;
    if (!a.scenario.empty()) {
        bool found = false;
        for (const auto& [config, name] : tsom::bevs_suite(nullptr, a.seed))
            if (name == a.scenario) {
                spec.config = config;
                found = true;
                break;
            }
        if (!found) throw tsom::ValidationError("unknown scenario: " + a.scenario);
    } else if (!a.config_path.empty()) {
        spec = parse_synth_spec(load_json_file(a.config_path));
        manifest.add_input(a.config_path);
    }
    const json bg_desc = resolve_background(spec, a.seed, &manifest);
    manifest.set_config(synth_config_to_json(spec.config, bg_desc));

    const auto [seq, gt] = tsom::generate(spec.config);
    for (int t = 0; t < seq.length(); ++t) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04d.png", t);
        const std::string path = manifest.path_in_out(name);
        tsom::save_frame(seq.frames[t], path);
        manifest.add_output(path);
    }
    const std::string gt_path = manifest.path_in_out("ground_truth.csv");
    tsom::write_ground_truth_csv(gt, gt_path);
    manifest.add_output(gt_path);
    manifest.finish();
    std::printf("frames=%d out=%s\n", seq.length(), a.out_dir.c_str());
    return 0;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
    std::string detections, gt, out_dir = "eval_out";
    double dist = 5.0;
    int t_begin = -1, n_frames = -1;
};

int run_eval(const EvalArgs& a) {
    Manifest manifest("eval", a.out_dir);
    manifest.set_seed(0);
    manifest.set_threads(1);
    manifest.add_input(a.detections);
    manifest.add_input(a.gt);
    manifest.set_config(json{{"dist", a.dist}, {"t_begin", a.t_begin}, {"n_frames", a.n_frames}});

    const auto dets = tsom::read_detections_csv(a.detections);
    const auto gt = tsom::read_ground_truth_csv(a.gt);
    const tsom::MatchResult r = tsom::match_detections(dets, gt, a.dist, a.t_begin, a.n_frames);
    const auto [dr, fa] = tsom::metrics(r);
    std::printf("D_R=%.4f F_A=%.4f\n", dr, fa);

    const json metrics_json{{"true_positives", r.true_positives},
                            {"false_positives", r.false_positives},
                            {"actual_objects", r.actual_objects},
                            {"n_frames", r.n_frames},
                            {"d_r", dr},
                            {"f_a", fa}};
    const std::string metrics_path = manifest.path_in_out("metrics.json");
    {
        std::ofstream out(metrics_path);
        if (!out) throw tsom::IoError("cannot write " + metrics_path);
        out << metrics_json.dump(2) << "\n";
    }
    manifest.add_output(metrics_path);
    manifest.finish();
    return 0;
}

// ---- tune ------------------------------------------------------------------

struct TuneArgs {
    std::string sweep, config_path, out_dir = "tune_out", measure = "response";
    std::vector<double> values;
    std::uint64_t seed = 0;
    int threads = 0, response_frames = 20, trial_frames = 200;
};

int run_tune(const TuneArgs& a) {
    static const std::map<std::string, tsom::SweepParameter> params = {
        {"radius", tsom::SweepParameter::radius},
        {"va", tsom::SweepParameter::v_a},
        {"luminance", tsom::SweepParameter::luminance},
        {"vb", tsom::SweepParameter::v_b},
        {"theta", tsom::SweepParameter::theta_bg}};
    const auto it = params.find(a.sweep);
    if (it == params.end())
        throw tsom::ValidationError("unknown sweep parameter: " + a.sweep);
    const tsom::SweepParameter param = it->second;

    std::vector<double> values = a.values;
    if (values.empty()) {
        switch (param) {
            case tsom::SweepParameter::radius:
                for (int r = 1; r <= 20; ++r) values.push_back(r);
                break;
            case tsom::SweepParameter::v_a:
                values = {10,  20,  40,  60,  80,  100, 120, 140,
                          160, 180, 200, 240, 280, 320, 360, 400};
                break;
            case tsom::SweepParameter::luminance:
                for (int l = 0; l <= 10; ++l) values.push_back(l / 10.0);
                break;
            case tsom::SweepParameter::v_b:
                for (int v = 0; v <= 400; v += 25) values.push_back(v);
                break;
            case tsom::SweepParameter::theta_bg:
                values = {0.0, tsom::kPi / 4, tsom::kPi / 2, 3 * tsom::kPi / 4, tsom::kPi};
                break;
        }
    }

    Manifest manifest("tune", a.out_dir);
    manifest.set_seed(a.seed);
    const int threads = resolve_threads(a.threads);
    manifest.set_threads(threads);

    tsom::SweepOptions opts;
    opts.response_frames = a.response_frames;
    opts.measure_response = a.measure == "response" || a.measure == "both";
    opts.measure_precision = a.measure == "precision" || a.measure == "both";
    if (!opts.measure_response && !opts.measure_precision)
        throw tsom::ValidationError("--measure must be response, precision, or both");
    opts.n_threads = threads;

    SynthSpec spec;
    spec.config.n_frames = a.trial_frames;
    tsom::PipelineConfig pipeline_config;
    if (!a.config_path.empty()) {
        const json j = load_json_file(a.config_path);
        manifest.add_input(a.config_path);
        if (j.contains("scene")) {
            spec = parse_synth_spec(j["scene"]);
            spec.config.n_frames = a.trial_frames;
        }
        if (j.contains("pipeline")) pipeline_config = j["pipeline"].get<tsom::PipelineConfig>();
    }

    // One shared background sized for the worst case across the sweep.
    double max_vb = spec.config.v_b;
    if (param == tsom::SweepParameter::v_b)
        for (double v : values) max_vb = std::max(max_vb, v);
    const int max_frames =
        std::max(opts.measure_precision ? spec.config.n_frames : 1, opts.response_frames);
    const double travel = (max_frames - 1) * max_vb / spec.config.fps;
    const int side = std::max<int>(64, spec.config.frame_size +
                                           static_cast<int>(std::ceil(travel)) + 2);
    spec.config.background =
        std::make_shared<tsom::Frame>(tsom::make_aerial_background(side, side, a.seed));

    manifest.set_config(json{
        {"sweep", a.sweep},
        {"values", values},
        {"measure", a.measure},
        {"response_frames", opts.response_frames},
        {"scene", synth_config_to_json(
                      spec.config, json{{"width", side}, {"height", side}, {"seed", a.seed}})},
        {"pipeline", json(pipeline_config)}});

    const auto curve = tsom::tuning_sweep(param, values, spec.config, pipeline_config, opts);
    const std::string csv_path = manifest.path_in_out("sweep_" + a.sweep + ".csv");
    tsom::write_sweep_csv(curve, csv_path, opts.measure_response, opts.measure_precision);
    manifest.add_output(csv_path);
    manifest.finish();
    std::printf("sweep=%s points=%zu out=%s\n", a.sweep.c_str(), curve.size(), csv_path.c_str());
    return 0;
}

// ---- circuit-verify --------------------------------------------------------

struct CircuitArgs {
    std::string out_dir = "circuit_out";
    long long trials = 100000;
    std::uint64_t seed = 0;
    int n_lo = 1, n_hi = 20;
};

int run_circuit_verify(const CircuitArgs& a) {
    Manifest manifest("circuit-verify", a.out_dir);
    manifest.set_seed(a.seed);
    manifest.set_threads(1);
    manifest.set_config(json{
        {"trials", a.trials}, {"n_subsets_min", a.n_lo}, {"n_subsets_max", a.n_hi}});

    const tsom::TrialReport report = tsom::verify_proposition(a.trials, a.n_lo, a.n_hi, a.seed);
    const std::string report_path = manifest.path_in_out("report.json");
    {
        std::ofstream out(report_path);
        if (!out) throw tsom::IoError("cannot write " + report_path);
        out << json(report).dump(2) << "\n";
    }
    manifest.add_output(report_path);
    manifest.finish();
    std::printf("trials=%lld violations=%lld min_margin=%.3e passed=%s\n", report.trials,
                report.violations, report.min_margin, report.passed ? "true" : "false");
    if (!report.passed)
        throw tsom::PropertyViolation(
            "two-stage dominance violated; counterexample recorded in " + report_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Small-target motion detection over image sequences"};
    app.require_subcommand(1);

    DetectArgs da;
    CLI::App* detect = app.add_subcommand("detect", "Run the detection pipeline on PNGs");
    detect->add_option("--input", da.input, "PNG file or directory of frames")->required();
    detect->add_option("--config", da.config_path, "Pipeline config JSON");
    detect->add_option("--out", da.out_dir, "Output directory");
    detect->add_option("--threads", da.threads, "Worker threads (0 = all cores)");
    detect->add_option("--top-k", da.top_k, "Detections per frame (overrides config)");
    detect->add_option("--floor", da.floor, "Score floor (overrides config)");
    detect->add_option("--fps", da.fps, "Frame rate of the input");
    detect->add_option("--gt", da.gt_path, "Ground-truth CSV; prints D_R/F_A");
    detect->add_flag("--save-maps", da.save_maps, "Write per-layer debug PNGs");
    detect->add_flag("--overlays", da.save_overlays, "Write detection overlay frames");
    detect->add_flag("--roc", da.do_roc, "Write roc.csv (needs --gt)");
    detect->add_option("--roc-top-k", da.roc_top_k, "Per-frame detection cap for the ROC");

    SynthArgs sa;
    CLI::App* synth = app.add_subcommand("synth", "Render a synthetic scene");
    synth->add_option("--config", sa.config_path, "Scene config JSON");
    synth->add_option("--out", sa.out_dir, "Output directory");
    synth->add_option("--seed", sa.seed, "Texture / scenario seed");
    synth->add_option("--scenario", sa.scenario, "Benchmark scenario name");
    synth->add_flag("--list-scenarios", sa.list_scenarios, "List scenario names and exit");

    EvalArgs ea;
    CLI::App* eval = app.add_subcommand("eval", "Score detections against ground truth");
    eval->add_option("--detections", ea.detections, "Detections CSV")->required();
    eval->add_option("--gt", ea.gt, "Ground-truth CSV")->required();
    eval->add_option("--out", ea.out_dir, "Output directory");
    eval->add_option("--dist", ea.dist, "Match distance threshold (px)");
    eval->add_option("--t-begin", ea.t_begin, "First evaluated frame");
    eval->add_option("--frames", ea.n_frames, "Evaluated frame count");

    TuneArgs ta;
    CLI::App* tune = app.add_subcommand("tune", "Parameter sweep experiments");
    tune->add_option("--sweep", ta.sweep, "radius | va | luminance | vb | theta")->required();
    tune->add_option("--values", ta.values, "Sweep values")->delimiter(',');
    tune->add_option("--config", ta.config_path, "JSON with \"scene\" and/or \"pipeline\"");
    tune->add_option("--out", ta.out_dir, "Output directory");
    tune->add_option("--seed", ta.seed, "Background seed");
    tune->add_option("--threads", ta.threads, "Worker threads (0 = all cores)");
    tune->add_option("--measure", ta.measure, "response | precision | both");
    tune->add_option("--response-frames", ta.response_frames, "Clip length for responses");
    tune->add_option("--trial-frames", ta.trial_frames, "Trial length for precision");

    CircuitArgs ca;
    CLI::App* circuit = app.add_subcommand("circuit-verify",
                                           "Monte Carlo check of projection dominance");
    circuit->add_option("--trials", ca.trials, "Number of random instances");
    circuit->add_option("--seed", ca.seed, "RNG seed");
    circuit->add_option("--out", ca.out_dir, "Output directory");
    circuit->add_option("--n-lo", ca.n_lo, "Minimum subset count");
    circuit->add_option("--n-hi", ca.n_hi, "Maximum subset count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (detect->parsed()) return run_detect(da);
        if (synth->parsed()) return run_synth(sa);
        if (eval->parsed()) return run_eval(ea);
        if (tune->parsed()) return run_tune(ta);
        if (circuit->parsed()) return run_circuit_verify(ca);
        return 1;
    } catch (const tsom::PropertyViolation& e) {
        std::fprintf(stderr, "property violation: %s\n", e.what());
        return 4;
    } catch (const tsom::ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 3;
    } catch (const tsom::IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 2;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
