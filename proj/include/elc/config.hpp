#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "elc/bounce.hpp"
#include "elc/detector.hpp"
#include "elc/eval.hpp"
#include "elc/serialize.hpp"
#include "elc/tracker.hpp"

namespace elc {

struct PipelineConfig {
    double fps = 240.0;
    std::string frame_pattern = "frame_%06d.png";
    DetectorConfig detector;
    TrackerConfig tracker;
    BounceConfig bounce;
    EvalConfig eval;
    std::optional<std::filesystem::path> court;

    void validate() const;
};

/// Canonical JSON form; every key a config file may carry appears here.
[[nodiscard]] json to_json(const PipelineConfig& cfg);

/// Keys absent from `j` keep their defaults. Unknown keys throw BadInput.
/// A relative `court` is resolved against `base_dir`.
[[nodiscard]] PipelineConfig config_from_json(const json& j, const std::filesystem::path& base_dir = {});

/// Applies one `dotted.key=value` override to a config document. The value is
/// parsed as JSON when possible, otherwise taken as a string.
void apply_override(json& doc, const std::string& assignment);

/// Defaults, then the optional file, then overrides in order.
[[nodiscard]] PipelineConfig load_config(const std::optional<std::filesystem::path>& file,
                                         const std::vector<std::string>& overrides = {});

}  // namespace elc
