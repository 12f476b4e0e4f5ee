#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "elc/linecall.hpp"

namespace elc {

enum class EvalMode : std::uint8_t { CallMatch, Distance };
std::string_view to_string(EvalMode m) noexcept;

struct EvalConfig {
    double epsilon = 5.0;  // px
    EvalMode mode = EvalMode::CallMatch;

    void validate() const;
};

struct SampleAnnotation {
    std::string id;
    std::filesystem::path source;  // frames directory or detections JSON
    std::filesystem::path court;
    Call gt_call = Call::In;
    std::optional<Point2> gt_bounce;
    std::string tag = "normal";  // "normal" | "confusing"
};

/// Manifest entries with paths resolved against the manifest's directory.
/// Throws BadInput on duplicate ids, unknown tags or missing sources.
[[nodiscard]] std::vector<SampleAnnotation> load_manifest(const std::filesystem::path& path);

/// What the pipeline produced for one sample.
struct SampleOutcome {
    Point2 point = Point2::Zero();
    Call call = Call::In;
    double margin = 0.0;
    bool confident = true;
};

/// L_v of one sample: call agreement, or predicted-to-true bounce distance
/// strictly below epsilon. Throws MissingGroundTruth in Distance mode
/// without gt_bounce.
[[nodiscard]] int judge_sample(const SampleOutcome& outcome, const SampleAnnotation& ann, const EvalConfig& cfg);

struct SampleRecord {
    std::string id;
    std::string tag;
    int l_v = 0;                         // under the configured mode
    int l_v_call = 0;
    std::optional<int> l_v_distance;     // when gt_bounce is known
    std::optional<Call> call;            // absent when the pipeline failed
    Call gt_call = Call::In;
    std::optional<double> margin;
    std::optional<double> bounce_err;
    bool confident = false;
    std::string error;                   // stage failure, if any
};

/// Builds the record for one sample; a failed run (nullopt) scores 0.
[[nodiscard]] SampleRecord make_record(const SampleAnnotation& ann, const std::optional<SampleOutcome>& outcome,
                                       const EvalConfig& cfg, const std::string& error = {});

struct TagStats {
    int count = 0;
    int successes = 0;
    double r_suc = 0.0;
};

struct EvalReport {
    EvalConfig config;
    std::vector<SampleRecord> records;  // ordered by id
    TagStats normal;
    TagStats confusing;
    TagStats total;
};

/// R_suc = sum L_v / N per tag and overall. Throws EmptyInput.
[[nodiscard]] EvalReport aggregate(std::vector<SampleRecord> records, const EvalConfig& cfg = {});

/// "99.4%"-style rendering, one decimal.
[[nodiscard]] std::string percent(double ratio);

/// Count / success / R_suc table in the usual three-row layout.
[[nodiscard]] std::string format_table(const EvalReport& report);

/// id,tag,L_v,call,gt_call,margin,bounce_err
[[nodiscard]] std::string to_csv(const EvalReport& report);

}  // namespace elc
