#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "elc/imaging.hpp"
#include "elc/linecall.hpp"

namespace elc::synth {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kOpticYellow = {210, 250, 40};
inline constexpr Rgb kCourtGreen = {40, 110, 60};

/// Image-space projectile with one bounce on a horizontal ground line.
/// Time t = 0 is frame `start_frame`; frames before it show background only.
struct SynthParams {
    Point2 p0{100.0, 100.0};
    Point2 v0{400.0, 600.0};  // px/s, image y grows downward
    double g = 2500.0;         // px/s^2
    double restitution = 0.7;  // e
    double friction = 0.8;     // mu, horizontal speed kept at the bounce
    double ground_y = 300.0;
    double fps = 240.0;
    int n_frames = 49;  // frames with motion
    int start_frame = 0;
    double noise_sigma = 0.0;
    double dropout_p = 0.0;
    double ball_radius = 3.0;
    std::uint64_t seed = 0;
    int width = 640;
    int height = 360;

    /// Throws BadInput.
    void validate() const;
};

struct Sample {
    int frame_index = 0;
    double t = 0.0;  // s since start_frame
    Point2 position = Point2::Zero();
};

struct GroundTruth {
    Point2 bounce_point = Point2::Zero();
    double bounce_time = 0.0;  // s, absolute (frame_index / fps clock)
    std::optional<Call> true_call;
    std::optional<double> true_margin;
    std::string decisive_line;
    std::string tag = "normal";  // "confusing" when |true_margin| <= 3 px
};

struct SynthTrajectory {
    std::vector<Sample> ideal;
    std::vector<Sample> observed;
    GroundTruth truth;
};

/// Closed-form landing time of y0 + vy t + g t^2 / 2 = ground_y.
[[nodiscard]] double landing_time(double y0, double vy, double g, double ground_y);

/// Throws NeverLands when the ground is not reached inside the sampled frames
/// and SecondBounce when a second contact would occur inside them.
[[nodiscard]] SynthTrajectory generate_trajectory(const SynthParams& params,
                                                  const CourtLineSpec* court = nullptr);

/// Ideal (noise-free) position at time t since start.
[[nodiscard]] Point2 ideal_position(const SynthParams& params, double t);

/// Solid background with an anti-aliased disc at `ball` (if any).
[[nodiscard]] FrameImage render_frame(const SynthParams& params, const std::optional<Point2>& ball,
                                      Rgb background = kCourtGreen, Rgb ball_color = kOpticYellow);

/// Frame at absolute index `frame_index` of a trajectory's rendered clip.
[[nodiscard]] FrameImage render_clip_frame(const SynthParams& params, const SynthTrajectory& traj,
                                           int frame_index, Rgb background = kCourtGreen);

/// Total frames in a rendered clip (lead-in plus motion).
[[nodiscard]] inline int clip_length(const SynthParams& p) { return p.start_frame + p.n_frames; }

/// Writes out_dir/frames/frame_%06d.png for every clip frame and
/// out_dir/ground_truth.json. Throws IoError.
GroundTruth render_frames(const SynthParams& params, Rgb background, const std::filesystem::path& out_dir,
                          const CourtLineSpec* court = nullptr);

// ---------------------------------------------------------------------------
// Randomised rallies against a fixed camera court.

struct ScenarioConfig {
    int width = 640;
    int height = 360;
    double fps = 240.0;
    int lead_in = 30;        // background-only frames, >= detector warmup
    int frames_before = 24;  // motion frames before the bounce
    int frames_after = 24;
    double noise_sigma = 1.0;
    double dropout_p = 0.05;
    double ball_radius = 3.0;
    double confusing_fraction = 0.05;
    double confusing_margin = 3.0;   // |margin| <= this is "confusing"
    double normal_margin_max = 60.0;
    double clearance = 20.0;  // minimum margin to non-decisive lines
};

/// Baseline plus right sideline, viewed from behind the baseline.
[[nodiscard]] CourtLineSpec default_court(int width = 640, int height = 360);

struct Scenario {
    SynthParams params;
    CourtLineSpec court;
    double target_margin = 0.0;
    std::string target_line;
};

/// Deterministic in (cfg, seed); the seed also drives the observation noise.
[[nodiscard]] Scenario make_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

}  // namespace elc::synth
