#pragma once

#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "elc/bounce.hpp"
#include "elc/eval.hpp"
#include "elc/linecall.hpp"
#include "elc/synth.hpp"
#include "elc/tracker.hpp"

namespace elc {

using json = nlohmann::json;

/// Throws BadInput on unreadable or malformed files.
[[nodiscard]] json read_json_file(const std::filesystem::path& path);
/// Two-space indented, trailing newline. Throws IoError.
void write_json_file(const std::filesystem::path& path, const json& doc);
[[nodiscard]] std::string dump(const json& doc);

/// Throws BadInput if `obj` is not an object or has a key outside `allowed`.
void require_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where);

/// Per-frame detector output: a hit or an explicit miss.
struct FrameRecord {
    int frame_index = 0;
    std::optional<BallDetection> detection;
};

struct DetectionLog {
    double fps = 240.0;
    int width = 0;
    int height = 0;
    std::vector<FrameRecord> frames;

    [[nodiscard]] std::vector<BallDetection> hits() const;
};

// Detections: {fps, width, height, frames: [{frame_index, x, y, area, score} | {frame_index, miss: true}]}
[[nodiscard]] json to_json(const DetectionLog& log);
/// Also accepts a trajectory document ({fps, width?, height?, points: [...]}).
[[nodiscard]] DetectionLog detection_log_from_json(const json& j);

// Trajectory: {fps, points: [{frame_index, x, y, area, score}]}
[[nodiscard]] json to_json(const Trajectory& traj);
[[nodiscard]] Trajectory trajectory_from_json(const json& j);

// Court: {lines: [{name, p0: [x, y], p1: [x, y], thickness, in_side}], delta}
[[nodiscard]] json to_json(const CourtLineSpec& court);
[[nodiscard]] CourtLineSpec court_from_json(const json& j);
[[nodiscard]] CourtLineSpec load_court(const std::filesystem::path& path);

// Bounce prediction: {x, y, u_star, combined_mse, confident, assignment_bits, mode, ...}
[[nodiscard]] json to_json(const BouncePrediction& pred);
[[nodiscard]] json to_json(const Verdict& verdict);

[[nodiscard]] json to_json(const synth::GroundTruth& truth);
[[nodiscard]] synth::GroundTruth ground_truth_from_json(const json& j);
[[nodiscard]] json to_json(const synth::SynthParams& params);
/// Missing keys keep their defaults; unknown keys are rejected.
[[nodiscard]] synth::SynthParams synth_params_from_json(const json& j);

[[nodiscard]] json to_json(const SampleAnnotation& ann);
[[nodiscard]] SampleAnnotation sample_annotation_from_json(const json& j);
[[nodiscard]] json to_json(const EvalReport& report);

}  // namespace elc
