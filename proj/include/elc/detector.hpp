#pragma once

#include <optional>
#include <vector>

#include "elc/imaging.hpp"

namespace elc {

/// Global parameters of the per-pixel Gaussian mixture.
struct MogParams {
    int max_modes = 5;         // K
    double alpha = 0.005;      // learning rate
    double bg_threshold = 0.7; // T, cumulative background weight
    double match_sigma = 2.5;  // lambda, match distance in std-devs
    double var_init = 225.0;   // 15^2
    double var_min = 4.0;

    void validate() const;
};

/// One Gaussian mode. The variance is shared across the three channels and
/// the match test compares the summed squared channel distance against it.
struct MogMode {
    float weight = 0.0F;
    float mean[3] = {0.0F, 0.0F, 0.0F};
    float var = 0.0F;
};

/// Per-pixel adaptive mixture-of-Gaussians background. Modes of each pixel
/// are kept sorted by weight / sqrt(var), descending.
class BackgroundModel {
public:
    BackgroundModel(int width, int height, MogParams params = {});

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] const MogParams& params() const noexcept { return params_; }

    [[nodiscard]] int mode_count(int x, int y) const noexcept {
        return counts_[index(x, y)];
    }
    [[nodiscard]] const MogMode& mode(int x, int y, int i) const noexcept {
        return modes_[index(x, y) * static_cast<std::size_t>(params_.max_modes) + static_cast<std::size_t>(i)];
    }

    /// Folds one frame into the model and returns its foreground mask.
    /// Throws DimensionMismatch.
    BinaryMask update(const FrameImage& frame);

private:
    [[nodiscard]] std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }
    void update_rows(const FrameImage& frame, BinaryMask& mask, int row_begin, int row_end);

    int width_;
    int height_;
    MogParams params_;
    std::vector<MogMode> modes_;
    std::vector<std::uint8_t> counts_;
};

/// Free-function form of BackgroundModel::update.
inline BinaryMask bg_update_and_classify(BackgroundModel& model, const FrameImage& frame) {
    return model.update(frame);
}

struct DetectorConfig {
    double hue_lo = 25.0;
    double hue_hi = 95.0;
    double sat_min = 0.25;
    double val_min = 0.25;
    double area_min_frac = 5e-6;  // fraction of frame area
    double area_max_frac = 5e-4;
    int morph_radius = 1;
    double gate_radius = 40.0;  // px
    int warmup_frames = 30;
    MogParams background;

    void validate() const;
    [[nodiscard]] double area_min_px(int width, int height) const noexcept {
        return area_min_frac * width * height;
    }
    [[nodiscard]] double area_max_px(int width, int height) const noexcept {
        return area_max_frac * width * height;
    }
};

struct BallDetection {
    int frame_index = 0;
    Point2 centroid = Point2::Zero();
    double area = 0.0;
    double score = 0.0;

    friend bool operator==(const BallDetection&, const BallDetection&) = default;
};

/// Stage two: cleans the mask, then keeps components whose mean HSV and area
/// fall inside the configured gates. Blob geometry comes from the cleaned mask;
/// color is averaged over the component pixels that were foreground in the
/// raw mask, so the dilation ring of background color does not bias the hue.
[[nodiscard]] std::vector<Blob> color_area_filter(const FrameImage& frame, const BinaryMask& mask,
                                                  const DetectorConfig& cfg);

[[nodiscard]] std::optional<BallDetection> select_ball(const std::vector<Blob>& blobs,
                                                       const std::optional<Point2>& predicted,
                                                       const DetectorConfig& cfg, int frame_index,
                                                       int frame_width, int frame_height);

/// Streaming two-stage detector: feed frames in capture order.
class BallDetector {
public:
    static constexpr int kPredictionHorizon = 5;  // frames

    BallDetector(int width, int height, DetectorConfig cfg);

    /// Returns nullopt during warmup and on misses.
    std::optional<BallDetection> process(const FrameImage& frame);

    [[nodiscard]] const BackgroundModel& model() const noexcept { return model_; }
    [[nodiscard]] const BinaryMask& last_mask() const noexcept { return last_mask_; }
    [[nodiscard]] int frames_seen() const noexcept { return frames_seen_; }

private:
    [[nodiscard]] std::optional<Point2> predict(int frame_index) const;

    DetectorConfig cfg_;
    BackgroundModel model_;
    BinaryMask last_mask_;
    int frames_seen_ = 0;
    std::vector<BallDetection> recent_;
};

}  // namespace elc
