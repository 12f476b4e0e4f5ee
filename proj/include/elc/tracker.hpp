#pragma once

#include <optional>
#include <vector>

#include "elc/detector.hpp"

namespace elc {

/// Time-ordered ball observations with strictly increasing frame index.
struct Trajectory {
    std::vector<BallDetection> points;
    double fps = 240.0;

    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
    /// Index of the lowest on-screen point (largest image y); first on ties.
    [[nodiscard]] std::size_t y_max_index() const;
    /// Throws BadInput if empty, frame indices not increasing, or fps <= 0.
    void validate() const;
};

struct TrackerConfig {
    int max_gap = 5;         // frames
    int min_track_len = 8;   // points
    int window_before = 10;  // points
    int window_after = 10;   // points

    void validate() const;
};

/// Joins consecutive detections; a run of more than max_gap missing frames
/// starts a new trajectory. Trajectories shorter than min_track_len are dropped.
[[nodiscard]] std::vector<Trajectory> assemble(const std::vector<std::optional<BallDetection>>& detections,
                                               const TrackerConfig& cfg, double fps);

/// Same, over detections already stripped of misses (frame order required).
[[nodiscard]] std::vector<Trajectory> assemble(const std::vector<BallDetection>& detections,
                                               const TrackerConfig& cfg, double fps);

/// Longest trajectory, earliest on ties. nullopt if none.
[[nodiscard]] std::optional<Trajectory> longest(const std::vector<Trajectory>& tracks);

/// Contiguous slice of up to window_before points before the y-max point and
/// window_after after it. Throws TooShort below min_track_len.
[[nodiscard]] Trajectory select_analysis_window(const Trajectory& traj, const TrackerConfig& cfg);

}  // namespace elc
