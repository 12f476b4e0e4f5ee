#include "elc/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include "elc/image_io.hpp"

namespace elc {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

DetectionLog detect(const FrameProvider& next, const PipelineConfig& cfg) {
    DetectionLog log;
    log.fps = cfg.fps;
    std::optional<BallDetector> detector;
    while (auto frame = next()) {
        if (!detector) {
            log.width = frame->width();
            log.height = frame->height();
            detector.emplace(log.width, log.height, cfg.detector);
        }
        FrameRecord rec;
        rec.frame_index = frame->frame_index();
        rec.detection = detector->process(*frame);
        log.frames.push_back(rec);
    }
    if (log.frames.empty()) throw Error(ErrorCode::MissingFrames, "frame stream is empty");
    return log;
}

DetectionLog detect_directory(const std::filesystem::path& frames_dir, const PipelineConfig& cfg) {
    const FrameListing listing = list_frames(frames_dir, cfg.frame_pattern);
    std::size_t i = 0;
    int w = 0;
    int h = 0;
    FrameProvider provider = [&]() -> std::optional<FrameImage> {
        if (i >= listing.files.size()) return std::nullopt;
        FrameImage f = load_listed_frame(listing, i, cfg.fps);
        if (i == 0) {
            w = f.width();
            h = f.height();
        } else if (f.width() != w || f.height() != h) {
            throw Error(ErrorCode::MixedDimensions, listing.files[i].string());
        }
        ++i;
        return f;
    };
    return detect(provider, cfg);
}

RunResult analyze(const DetectionLog& log, const CourtLineSpec& court, const PipelineConfig& cfg) {
    RunResult r;
    r.frames = static_cast<int>(log.frames.size());
    const auto hits = log.hits();
    r.detections = static_cast<int>(hits.size());

    auto t0 = Clock::now();
    const auto tracks = assemble(hits, cfg.tracker, log.fps);
    const auto best = longest(tracks);
    if (!best) {
        throw Error(ErrorCode::DetectorFailed, "no track: " + std::to_string(hits.size()) +
                                                   " detections, none in a track of >= " +
                                                   std::to_string(cfg.tracker.min_track_len) + " points");
    }
    r.trajectory_length = static_cast<int>(best->size());
    r.window = select_analysis_window(*best, cfg.tracker);
    r.timings.track_ms = ms_since(t0);

    t0 = Clock::now();
    BounceConfig bcfg = cfg.bounce;
    if (log.width > 0 && log.height > 0) bcfg.frame_size = std::make_pair(log.width, log.height);
    r.prediction = predict_bounce(r.window, bcfg);
    r.timings.bounce_ms = ms_since(t0);

    t0 = Clock::now();
    r.verdict = call(r.prediction, court, court.delta);
    r.timings.call_ms = ms_since(t0);
    return r;
}

RunResult run_pipeline(const FrameProvider& frames, const CourtLineSpec& court, const PipelineConfig& cfg) {
    const auto t0 = Clock::now();
    const DetectionLog log = detect(frames, cfg);
    const double detect_ms = ms_since(t0);
    RunResult r = analyze(log, court, cfg);
    r.timings.detect_ms = detect_ms;
    return r;
}

RunResult run_pipeline(const std::filesystem::path& frames_dir, const CourtLineSpec& court, const PipelineConfig& cfg) {
    const auto t0 = Clock::now();
    const DetectionLog log = detect_directory(frames_dir, cfg);
    const double detect_ms = ms_since(t0);
    RunResult r = analyze(log, court, cfg);
    r.timings.detect_ms = detect_ms;
    return r;
}

json to_json(const RunResult& r, bool include_timings) {
    json j = {{"frames", r.frames},
              {"detections", r.detections},
              {"trajectory_length", r.trajectory_length},
              {"window", to_json(r.window)},
              {"prediction", to_json(r.prediction)},
              {"verdict", to_json(r.verdict)}};
    if (!r.id.empty()) j["id"] = r.id;
    if (include_timings) {
        j["timings_ms"] = {{"detect", r.timings.detect_ms},
                           {"track", r.timings.track_ms},
                           {"bounce", r.timings.bounce_ms},
                           {"call", r.timings.call_ms}};
    }
    return j;
}

EvalReport evaluate_manifest(const std::vector<SampleAnnotation>& samples, const PipelineConfig& cfg, int threads) {
    std::vector<SampleRecord> records(samples.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr fatal;

    auto worker = [&] {
        for (std::size_t i = next++; i < samples.size(); i = next++) {
            const SampleAnnotation& ann = samples[i];
            try {
                const CourtLineSpec court = load_court(ann.court);
                std::optional<SampleOutcome> outcome;
                std::string error;
                try {
                    RunResult r;
                    if (std::filesystem::is_directory(ann.source)) {
                        r = run_pipeline(ann.source, court, cfg);
                    } else {
                        r = analyze(detection_log_from_json(read_json_file(ann.source)), court, cfg);
                    }
                    outcome = SampleOutcome{r.prediction.point, r.verdict.call, r.verdict.margin, r.prediction.confident};
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::DetectorFailed && e.code() != ErrorCode::AnalysisFailed) throw;
                    error = e.what();
                }
                records[i] = make_record(ann, outcome, cfg.eval, error);
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (!fatal) fatal = std::current_exception();
            }
        }
    };

    const int n = std::max(1, std::min<int>(threads, static_cast<int>(samples.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (fatal) std::rethrow_exception(fatal);
    return aggregate(std::move(records), cfg.eval);
}

}  // namespace elc
