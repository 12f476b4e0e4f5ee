#include "elc/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "elc/image_io.hpp"
#include "elc/overlay.hpp"
#include "elc/pipeline.hpp"

namespace elc {
namespace {

namespace fs = std::filesystem;

struct Common {
    std::optional<fs::path> config;
    std::vector<std::string> overrides;
    std::optional<fs::path> out;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "pipeline config JSON");
    cmd->add_option("--set", c.overrides, "override a config key, e.g. --set bounce.tau_v=2")->take_all();
}

// Writes to --out when given, otherwise to `out`.
void emit(const json& doc, const std::optional<fs::path>& path, std::ostream& out) {
    if (path) {
        write_json_file(*path, doc);
    } else {
        out << dump(doc);
    }
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

CourtLineSpec resolve_court(const std::optional<fs::path>& flag, const PipelineConfig& cfg) {
    if (flag) return load_court(*flag);
    if (cfg.court) return load_court(*cfg.court);
    throw UsageError("--court is required (or set \"court\" in the config)");
}

FrameImage blank_canvas(const DetectionLog& log) {
    const int w = log.width > 0 ? log.width : 640;
    const int h = log.height > 0 ? log.height : 360;
    return FrameImage(w, h, 0, 0, 0);
}

// The frame nearest the bounce anchor.
FrameImage overlay_background(const fs::path& frames_dir, const PipelineConfig& cfg, const RunResult& r) {
    const FrameListing listing = list_frames(frames_dir, cfg.frame_pattern);
    const PhaseLabeling& lab = r.prediction.labeling;
    const int want = lab.frames.empty() ? listing.indices.front() : lab.frames[lab.anchor];
    std::size_t best = 0;
    for (std::size_t i = 0; i < listing.indices.size(); ++i) {
        if (std::abs(listing.indices[i] - want) < std::abs(listing.indices[best] - want)) best = i;
    }
    return load_listed_frame(listing, best, cfg.fps);
}

DetectionLog log_from_trajectory(const synth::SynthTrajectory& traj, const synth::SynthParams& p) {
    DetectionLog log;
    log.fps = p.fps;
    log.width = p.width;
    log.height = p.height;
    std::size_t k = 0;
    for (int f = 0; f < synth::clip_length(p); ++f) {
        FrameRecord rec;
        rec.frame_index = f;
        if (k < traj.observed.size() && traj.observed[k].frame_index == f) {
            const double area = std::numbers::pi * p.ball_radius * p.ball_radius;
            rec.detection = BallDetection{f, traj.observed[k].position, area, 1.0};
            ++k;
        }
        log.frames.push_back(rec);
    }
    return log;
}

// One synthetic sample under `dir`; returns its manifest entry with paths relative to `root`.
json write_sample(const std::string& id, const synth::SynthParams& params, const CourtLineSpec* court,
                  const fs::path& root, const fs::path& dir, bool detections_only) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
    synth::GroundTruth truth;
    fs::path source;
    if (detections_only) {
        const synth::SynthTrajectory traj = synth::generate_trajectory(params, court);
        truth = traj.truth;
        write_json_file(dir / "detections.json", to_json(log_from_trajectory(traj, params)));
        write_json_file(dir / "ground_truth.json", to_json(truth));
        source = dir / "detections.json";
    } else {
        truth = synth::render_frames(params, synth::kCourtGreen, dir, court);
        source = dir / "frames";
    }
    write_json_file(dir / "params.json", to_json(params));
    if (!court) return json(nullptr);
    write_json_file(dir / "court.json", to_json(*court));

    SampleAnnotation ann;
    ann.id = id;
    ann.source = fs::relative(source, root);
    ann.court = fs::relative(dir / "court.json", root);
    ann.gt_call = truth.true_call.value_or(Call::In);
    ann.gt_bounce = truth.bounce_point;
    ann.tag = truth.tag;
    return to_json(ann);
}

std::optional<std::uint64_t> env_seed() {
    const char* s = std::getenv("ELC_SEED");
    if (!s || !*s) return std::nullopt;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(s, &used);
        if (used != std::string(s).size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::BadInput, std::string("ELC_SEED is not an unsigned integer: ") + s);
    }
}

CourtLine parse_line_flag(const std::string& spec) {
    // name:x0,y0,x1,y1[:thickness[:in_side]]
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() < 2 || parts.size() > 4 || parts[0].empty()) {
        throw UsageError("--line expects name:x0,y0,x1,y1[:thickness[:in_side]], got '" + spec + "'");
    }
    CourtLine line;
    line.name = parts[0];
    std::vector<double> xy;
    std::stringstream cs(parts[1]);
    try {
        for (std::string v; std::getline(cs, v, ',');) xy.push_back(std::stod(v));
        if (parts.size() > 2) line.thickness = std::stod(parts[2]);
        if (parts.size() > 3) line.in_side = std::stoi(parts[3]);
    } catch (const std::exception&) {
        throw UsageError("--line has a malformed number: '" + spec + "'");
    }
    if (xy.size() != 4) throw UsageError("--line needs four coordinates: '" + spec + "'");
    line.p0 = Point2(xy[0], xy[1]);
    line.p1 = Point2(xy[2], xy[3]);
    return line;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Monocular electronic line calling toolkit"};
    app.name(args.empty() ? "elc" : fs::path(args[0]).filename().string());
    app.require_subcommand(1);

    // detect
    Common detect_c;
    fs::path detect_frames;
    auto* detect_cmd = app.add_subcommand("detect", "frames directory -> detections JSON");
    add_common(detect_cmd, detect_c);
    detect_cmd->add_option("--frames", detect_frames, "directory of frame images")->required();
    detect_cmd->add_option("--out", detect_c.out, "output file (default stdout)");

    // analyze
    Common analyze_c;
    fs::path analyze_det;
    std::optional<fs::path> analyze_court, analyze_overlay, analyze_frame;
    auto* analyze_cmd = app.add_subcommand("analyze", "detections + court -> bounce prediction and verdict");
    add_common(analyze_cmd, analyze_c);
    analyze_cmd->add_option("--detections", analyze_det, "detections or trajectory JSON")->required();
    analyze_cmd->add_option("--court", analyze_court, "court line spec JSON");
    analyze_cmd->add_option("--overlay", analyze_overlay, "write an overlay PNG here");
    analyze_cmd->add_option("--frame", analyze_frame, "background image for the overlay");
    analyze_cmd->add_option("--out", analyze_c.out, "output file (default stdout)");

    // run
    Common run_c;
    fs::path run_frames;
    std::optional<fs::path> run_court, run_overlay;
    bool run_timings = false;
    auto* run_cmd = app.add_subcommand("run", "frames + court -> verdict");
    add_common(run_cmd, run_c);
    run_cmd->add_option("--frames", run_frames, "directory of frame images")->required();
    run_cmd->add_option("--court", run_court, "court line spec JSON");
    run_cmd->add_option("--overlay", run_overlay, "write an overlay PNG here");
    run_cmd->add_flag("--timings", run_timings, "include per-stage wall times in the result");
    run_cmd->add_option("--out", run_c.out, "output file (default stdout)");

    // synth
    fs::path synth_out;
    std::optional<fs::path> synth_params, synth_court;
    int synth_count = 3;
    std::uint64_t synth_seed = 0;
    bool synth_det_only = false;
    auto* synth_cmd = app.add_subcommand("synth", "write synthetic sample directories and a manifest");
    synth_cmd->add_option("--out", synth_out, "output directory")->required();
    synth_cmd->add_option("--params", synth_params, "explicit SynthParams JSON (one sample)");
    synth_cmd->add_option("--court", synth_court, "court spec used for the ground-truth call");
    synth_cmd->add_option("--count", synth_count, "number of random rallies")->check(CLI::Range(1, 1000000));
    synth_cmd->add_option("--seed", synth_seed, "first seed (ELC_SEED overrides)");
    synth_cmd->add_flag("--detections-only", synth_det_only, "write detections.json instead of frames");

    // eval
    Common eval_c;
    fs::path eval_manifest;
    std::optional<fs::path> eval_csv;
    int eval_threads = 1;
    auto* eval_cmd = app.add_subcommand("eval", "manifest -> success-rate report");
    add_common(eval_cmd, eval_c);
    eval_cmd->add_option("--manifest", eval_manifest, "manifest JSON")->required();
    eval_cmd->add_option("--out", eval_c.out, "report JSON (default stdout)");
    eval_cmd->add_option("--csv", eval_csv, "per-sample CSV");
    eval_cmd->add_option("--threads", eval_threads, "concurrent samples")->check(CLI::Range(1, 256));

    // init-court
    std::vector<std::string> court_lines;
    std::optional<fs::path> court_from, court_out;
    std::optional<double> court_delta;
    auto* court_cmd = app.add_subcommand("init-court", "endpoint coordinates -> court spec JSON");
    court_cmd->add_option("--line", court_lines, "name:x0,y0,x1,y1[:thickness[:in_side]]")->take_all();
    court_cmd->add_option("--from", court_from, "start from an existing court spec");
    court_cmd->add_option("--delta", court_delta, "IN bias in px");
    court_cmd->add_option("--out", court_out, "output file (default stdout)");

    CLI::App* active = &app;
    try {
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        if (argv.empty()) argv.push_back("elc");
        app.parse(static_cast<int>(argv.size()), argv.data());
        for (auto* sub : app.get_subcommands()) active = sub;

        if (active == detect_cmd) {
            const PipelineConfig cfg = load_config(detect_c.config, detect_c.overrides);
            emit(to_json(detect_directory(detect_frames, cfg)), detect_c.out, out);
        } else if (active == analyze_cmd) {
            const PipelineConfig cfg = load_config(analyze_c.config, analyze_c.overrides);
            const CourtLineSpec court = resolve_court(analyze_court, cfg);
            const DetectionLog log = detection_log_from_json(read_json_file(analyze_det));
            const RunResult r = analyze(log, court, cfg);
            if (analyze_overlay) {
                const FrameImage bg = analyze_frame ? read_image(*analyze_frame) : blank_canvas(log);
                write_png(*analyze_overlay, render_overlay(bg, r.window, r.prediction, r.verdict));
            }
            emit(to_json(r), analyze_c.out, out);
        } else if (active == run_cmd) {
            const PipelineConfig cfg = load_config(run_c.config, run_c.overrides);
            const CourtLineSpec court = resolve_court(run_court, cfg);
            const RunResult r = run_pipeline(run_frames, court, cfg);
            if (run_overlay) {
                write_png(*run_overlay, render_overlay(overlay_background(run_frames, cfg, r), r.window,
                                                       r.prediction, r.verdict));
            }
            emit(to_json(r, run_timings), run_c.out, out);
        } else if (active == synth_cmd) {
            if (const auto s = env_seed()) synth_seed = *s;
            json samples = json::array();
            if (synth_params) {
                synth::SynthParams p = synth_params_from_json(read_json_file(*synth_params));
                if (synth_cmd->count("--seed") > 0 || env_seed()) p.seed = synth_seed;
                std::optional<CourtLineSpec> court;
                if (synth_court) court = load_court(*synth_court);
                json entry = write_sample("sample_0000", p, court ? &*court : nullptr, synth_out, synth_out,
                                          synth_det_only);
                if (!entry.is_null()) samples.push_back(entry);
            } else {
                const synth::ScenarioConfig scfg;
                std::optional<CourtLineSpec> fixed;
                if (synth_court) fixed = load_court(*synth_court);
                for (int i = 0; i < synth_count; ++i) {
                    synth::Scenario sc = synth::make_scenario(scfg, synth_seed + static_cast<std::uint64_t>(i));
                    const CourtLineSpec& court = fixed ? *fixed : sc.court;
                    const std::string id = format_frame_name("sample_%04d", i);
                    samples.push_back(write_sample(id, sc.params, &court, synth_out, synth_out / id, synth_det_only));
                }
            }
            write_json_file(synth_out / "manifest.json", json{{"samples", samples}});
            out << "wrote " << samples.size() << " sample(s) to " << (synth_out / "manifest.json").string() << "\n";
        } else if (active == eval_cmd) {
            const PipelineConfig cfg = load_config(eval_c.config, eval_c.overrides);
            const EvalReport report = evaluate_manifest(load_manifest(eval_manifest), cfg, eval_threads);
            emit(to_json(report), eval_c.out, out);
            if (eval_csv) {
                std::ofstream f(*eval_csv, std::ios::binary);
                f << to_csv(report);
                if (!f) throw Error(ErrorCode::IoError, "cannot write " + eval_csv->string());
            }
            (eval_c.out ? out : err) << format_table(report);
        } else if (active == court_cmd) {
            CourtLineSpec court;
            if (court_from) court = load_court(*court_from);
            for (const auto& l : court_lines) court.lines.push_back(parse_line_flag(l));
            if (court_delta) court.delta = *court_delta;
            if (court.lines.empty()) throw UsageError("init-court needs at least one --line (or --from)");
            court.validate();
            emit(to_json(court), court_out, out);
        }
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        for (auto* sub : app.get_subcommands()) active = sub;
        err << "error: " << e.what() << "\n\n" << active->help();
        return kExitBadInput;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << active->help();
        return kExitBadInput;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        if (e.code() == ErrorCode::DetectorFailed || e.code() == ErrorCode::AnalysisFailed) return kExitAnalysisFailed;
        return kExitBadInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
}

}  // namespace elc
