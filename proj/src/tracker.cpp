#include "elc/tracker.hpp"

#include <algorithm>

#include "elc/error.hpp"

namespace elc {

std::size_t Trajectory::y_max_index() const {
    if (points.empty()) throw Error(ErrorCode::TooShort, "empty trajectory");
    std::size_t best = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].centroid.y() > points[best].centroid.y()) best = i;
    }
    return best;
}

void Trajectory::validate() const {
    if (points.empty()) throw Error(ErrorCode::BadInput, "trajectory has no points");
    if (!(fps > 0.0)) throw Error(ErrorCode::BadInput, "trajectory fps must be positive");
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].frame_index <= points[i - 1].frame_index) {
            throw Error(ErrorCode::BadInput, "trajectory frame indices must strictly increase");
        }
    }
}

void TrackerConfig::validate() const {
    if (max_gap < 1 || min_track_len < 1 || window_before < 1 || window_after < 1) {
        throw Error(ErrorCode::InvalidConfig, "tracker parameters must be positive");
    }
}

std::vector<Trajectory> assemble(const std::vector<BallDetection>& detections, const TrackerConfig& cfg,
                                 double fps) {
    cfg.validate();
    std::vector<Trajectory> out;
    Trajectory current;
    current.fps = fps;
    auto flush = [&] {
        if (static_cast<int>(current.points.size()) >= cfg.min_track_len) out.push_back(current);
        current.points.clear();
    };
    for (const BallDetection& d : detections) {
        if (!current.points.empty()) {
            const int prev = current.points.back().frame_index;
            if (d.frame_index <= prev) {
                throw Error(ErrorCode::BadInput, "detections must be in increasing frame order");
            }
            if (d.frame_index - prev - 1 > cfg.max_gap) flush();
        }
        current.points.push_back(d);
    }
    flush();
    return out;
}

std::vector<Trajectory> assemble(const std::vector<std::optional<BallDetection>>& detections,
                                 const TrackerConfig& cfg, double fps) {
    std::vector<BallDetection> hits;
    for (const auto& d : detections) {
        if (d) hits.push_back(*d);
    }
    return assemble(hits, cfg, fps);
}

std::optional<Trajectory> longest(const std::vector<Trajectory>& tracks) {
    const Trajectory* best = nullptr;
    for (const Trajectory& t : tracks) {
        if (best == nullptr || t.size() > best->size()) best = &t;
    }
    if (best == nullptr) return std::nullopt;
    return *best;
}

Trajectory select_analysis_window(const Trajectory& traj, const TrackerConfig& cfg) {
    cfg.validate();
    if (static_cast<int>(traj.size()) < cfg.min_track_len) {
        throw Error(ErrorCode::TooShort, "trajectory has " + std::to_string(traj.size()) + " points, need " +
                                             std::to_string(cfg.min_track_len));
    }
    const auto anchor = static_cast<std::ptrdiff_t>(traj.y_max_index());
    const auto n = static_cast<std::ptrdiff_t>(traj.size());
    const std::ptrdiff_t first = std::max<std::ptrdiff_t>(0, anchor - cfg.window_before);
    const std::ptrdiff_t last = std::min<std::ptrdiff_t>(n - 1, anchor + cfg.window_after);
    Trajectory window;
    window.fps = traj.fps;
    window.points.assign(traj.points.begin() + first, traj.points.begin() + last + 1);
    return window;
}

}  // namespace elc
