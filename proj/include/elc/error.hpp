#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace elc {

enum class ErrorCode {
    // imaging
    MissingDirectory,
    MissingFrames,
    MixedDimensions,
    UndecodableFrame,
    InvalidImage,
    IoError,
    // detector
    DimensionMismatch,
    InvalidConfig,
    // tracker / bounce
    TooShort,
    PhaseStarved,
    Degenerate,
    NoFeasibleAssignment,
    NoIntersection,
    IdenticalCurves,
    // linecall
    DegenerateLine,
    // synth
    NeverLands,
    SecondBounce,
    // eval
    MissingGroundTruth,
    EmptyInput,
    // pipeline stages
    DetectorFailed,
    AnalysisFailed,
    BadInput,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code. Pipeline stages rethrow with
/// DetectorFailed / AnalysisFailed and keep the underlying reason in what().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MissingDirectory: return "MissingDirectory";
        case ErrorCode::MissingFrames: return "MissingFrames";
        case ErrorCode::MixedDimensions: return "MixedDimensions";
        case ErrorCode::UndecodableFrame: return "UndecodableFrame";
        case ErrorCode::InvalidImage: return "InvalidImage";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::PhaseStarved: return "PhaseStarved";
        case ErrorCode::Degenerate: return "Degenerate";
        case ErrorCode::NoFeasibleAssignment: return "NoFeasibleAssignment";
        case ErrorCode::NoIntersection: return "NoIntersection";
        case ErrorCode::IdenticalCurves: return "IdenticalCurves";
        case ErrorCode::DegenerateLine: return "DegenerateLine";
        case ErrorCode::NeverLands: return "NeverLands";
        case ErrorCode::SecondBounce: return "SecondBounce";
        case ErrorCode::MissingGroundTruth: return "MissingGroundTruth";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::DetectorFailed: return "DetectorFailed";
        case ErrorCode::AnalysisFailed: return "AnalysisFailed";
        case ErrorCode::BadInput: return "BadInput";
    }
    return "Unknown";
}

}  // namespace elc
