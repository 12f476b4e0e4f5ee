#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "elc/config.hpp"
#include "elc/eval.hpp"
#include "elc/serialize.hpp"

namespace elc {

/// Yields frames in capture order; nullopt ends the stream.
using FrameProvider = std::function<std::optional<FrameImage>()>;

struct StageTimings {
    double detect_ms = 0.0;
    double track_ms = 0.0;
    double bounce_ms = 0.0;
    double call_ms = 0.0;
};

struct RunResult {
    std::string id;
    int frames = 0;
    int detections = 0;
    int trajectory_length = 0;
    Trajectory window;
    BouncePrediction prediction;
    Verdict verdict;
    StageTimings timings;
};

/// Stage one+two detection over a frame stream. Throws DimensionMismatch on
/// mixed frame sizes and MissingFrames on an empty stream.
[[nodiscard]] DetectionLog detect(const FrameProvider& next, const PipelineConfig& cfg);
[[nodiscard]] DetectionLog detect_directory(const std::filesystem::path& frames_dir, const PipelineConfig& cfg);

/// assemble -> window -> predict_bounce -> call. Throws DetectorFailed when no
/// trajectory survives, AnalysisFailed when the bounce cannot be analysed.
[[nodiscard]] RunResult analyze(const DetectionLog& log, const CourtLineSpec& court, const PipelineConfig& cfg);

[[nodiscard]] RunResult run_pipeline(const std::filesystem::path& frames_dir, const CourtLineSpec& court,
                                     const PipelineConfig& cfg);
[[nodiscard]] RunResult run_pipeline(const FrameProvider& frames, const CourtLineSpec& court,
                                     const PipelineConfig& cfg);

/// Timings are wall-clock and left out unless asked for, so that result files
/// stay byte-identical across runs.
[[nodiscard]] json to_json(const RunResult& result, bool include_timings = false);

/// Runs every sample (frames directory or detections file) and aggregates.
/// Samples are processed on up to `threads` workers; the report is ordered by id.
[[nodiscard]] EvalReport evaluate_manifest(const std::vector<SampleAnnotation>& samples, const PipelineConfig& cfg,
                                           int threads = 1);

}  // namespace elc
