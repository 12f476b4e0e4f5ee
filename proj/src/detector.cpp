#include "elc/detector.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "elc/error.hpp"

namespace elc {

void MogParams::validate() const {
    if (max_modes < 1 || max_modes > 255) throw Error(ErrorCode::InvalidConfig, "max_modes must be in [1,255]");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidConfig, "alpha must be in (0,1)");
    if (!(bg_threshold > 0.0 && bg_threshold <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "bg_threshold must be in (0,1]");
    }
    if (!(match_sigma > 0.0)) throw Error(ErrorCode::InvalidConfig, "match_sigma must be positive");
    if (!(var_min > 0.0) || !(var_init >= var_min)) {
        throw Error(ErrorCode::InvalidConfig, "need 0 < var_min <= var_init");
    }
}

void DetectorConfig::validate() const {
    if (!(hue_lo < hue_hi)) throw Error(ErrorCode::InvalidConfig, "hue_lo must be < hue_hi");
    if (sat_min < 0.0 || sat_min > 1.0 || val_min < 0.0 || val_min > 1.0) {
        throw Error(ErrorCode::InvalidConfig, "sat_min/val_min must be in [0,1]");
    }
    if (!(area_min_frac >= 0.0 && area_min_frac < area_max_frac)) {
        throw Error(ErrorCode::InvalidConfig, "need 0 <= area_min_frac < area_max_frac");
    }
    if (morph_radius < 0) throw Error(ErrorCode::InvalidConfig, "morph_radius must be >= 0");
    if (!(gate_radius > 0.0)) throw Error(ErrorCode::InvalidConfig, "gate_radius must be positive");
    if (warmup_frames < 1) throw Error(ErrorCode::InvalidConfig, "warmup_frames must be >= 1");
    background.validate();
}

// ---------------------------------------------------------------------------

BackgroundModel::BackgroundModel(int width, int height, MogParams params)
    : width_(width), height_(height), params_(params) {
    params_.validate();
    if (width <= 0 || height <= 0) throw Error(ErrorCode::InvalidConfig, "model dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    modes_.resize(n * static_cast<std::size_t>(params_.max_modes));
    counts_.assign(n, 0);
}

BinaryMask BackgroundModel::update(const FrameImage& frame) {
    if (frame.width() != width_ || frame.height() != height_) {
        throw Error(ErrorCode::DimensionMismatch, "frame " + std::to_string(frame.width()) + "x" +
                                                      std::to_string(frame.height()) + " vs model " +
                                                      std::to_string(width_) + "x" + std::to_string(height_));
    }
    BinaryMask mask(width_, height_);
    // Rows are independent; split across threads when more than one core exists.
    const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
    const int chunks = static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(height_)));
    if (chunks <= 1) {
        update_rows(frame, mask, 0, height_);
        return mask;
    }
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(chunks));
    for (int c = 0; c < chunks; ++c) {
        const int begin = height_ * c / chunks;
        const int end = height_ * (c + 1) / chunks;
        workers.emplace_back([this, &frame, &mask, begin, end] { update_rows(frame, mask, begin, end); });
    }
    for (auto& t : workers) t.join();
    return mask;
}

void BackgroundModel::update_rows(const FrameImage& frame, BinaryMask& mask, int row_begin, int row_end) {
    const int K = params_.max_modes;
    const float alpha = static_cast<float>(params_.alpha);
    const float decay = 1.0F - alpha;
    const float lambda2 = static_cast<float>(params_.match_sigma * params_.match_sigma);
    const float var_init = static_cast<float>(params_.var_init);
    const float var_min = static_cast<float>(params_.var_min);
    const float bg_threshold = static_cast<float>(params_.bg_threshold);
    auto bits = mask.bits();

    for (int y = row_begin; y < row_end; ++y) {
        const std::uint8_t* px = frame.at(0, y);
        for (int x = 0; x < width_; ++x, px += 3) {
            const std::size_t p = index(x, y);
            MogMode* m = &modes_[p * static_cast<std::size_t>(K)];
            int n = counts_[p];
            const float sample[3] = {static_cast<float>(px[0]), static_cast<float>(px[1]),
                                     static_cast<float>(px[2])};

            int matched = -1;
            float matched_d2 = 0.0F;
            for (int i = 0; i < n; ++i) {
                const float d0 = sample[0] - m[i].mean[0];
                const float d1 = sample[1] - m[i].mean[1];
                const float d2 = sample[2] - m[i].mean[2];
                const float dist2 = d0 * d0 + d1 * d1 + d2 * d2;
                if (dist2 < lambda2 * m[i].var) {
                    matched = i;
                    matched_d2 = dist2;
                    break;
                }
            }

            const bool no_match = matched < 0;
            for (int i = 0; i < n; ++i) m[i].weight *= decay;
            if (!no_match) {
                MogMode& mm = m[matched];
                mm.weight += alpha;  // (1-a)w + a == w + a(1-w)
                for (int c = 0; c < 3; ++c) mm.mean[c] += alpha * (sample[c] - mm.mean[c]);
                mm.var = std::max(var_min, mm.var + alpha * (matched_d2 - mm.var));
            } else {
                int slot;
                if (n < K) {
                    slot = n++;
                } else {
                    slot = 0;
                    for (int i = 1; i < n; ++i) {
                        if (m[i].weight < m[slot].weight) slot = i;
                    }
                }
                m[slot].weight = alpha;
                for (int c = 0; c < 3; ++c) m[slot].mean[c] = sample[c];
                m[slot].var = var_init;
                matched = slot;
            }

            float total = 0.0F;
            for (int i = 0; i < n; ++i) total += m[i].weight;
            const float inv = 1.0F / total;
            for (int i = 0; i < n; ++i) m[i].weight *= inv;

            // Insertion sort by fitness, tracking where the matched mode lands.
            for (int i = 1; i < n; ++i) {
                const MogMode key = m[i];
                const bool key_matched = matched == i;
                const float key_fit = key.weight / std::sqrt(key.var);
                int j = i - 1;
                while (j >= 0 && m[j].weight / std::sqrt(m[j].var) < key_fit) {
                    m[j + 1] = m[j];
                    if (matched == j) matched = j + 1;
                    --j;
                }
                if (key_matched) matched = j + 1;
                m[j + 1] = key;
            }
            counts_[p] = static_cast<std::uint8_t>(n);

            int bg_count = n;
            float cum = 0.0F;
            for (int i = 0; i < n; ++i) {
                cum += m[i].weight;
                if (cum > bg_threshold) {
                    bg_count = i + 1;
                    break;
                }
            }
            bits[p] = (no_match || matched >= bg_count) ? 1 : 0;
        }
    }
}

// ---------------------------------------------------------------------------

std::vector<Blob> color_area_filter(const FrameImage& frame, const BinaryMask& mask, const DetectorConfig& cfg) {
    if (mask.width() != frame.width() || mask.height() != frame.height()) {
        throw Error(ErrorCode::DimensionMismatch, "mask and frame dimensions differ");
    }
    const BinaryMask cleaned = morph_open_dilate(mask, cfg.morph_radius);
    const ComponentLabels comps = label_components(cleaned);
    const std::size_t nb = comps.blobs.size();
    if (nb == 0) return {};

    struct Acc {
        double h = 0, s = 0, v = 0;
        int n = 0;
    };
    std::vector<Acc> acc(nb);
    const int w = frame.width();
    for (int y = 0; y < frame.height(); ++y) {
        for (int x = 0; x < w; ++x) {
            const int label = comps.labels[static_cast<std::size_t>(y) * w + x];
            if (label < 0 || !mask.get(x, y)) continue;
            const std::uint8_t* px = frame.at(x, y);
            const Hsv hsv = rgb_to_hsv(px[0], px[1], px[2]);
            Acc& a = acc[static_cast<std::size_t>(label)];
            a.h += hsv.h;
            a.s += hsv.s;
            a.v += hsv.v;
            ++a.n;
        }
    }

    const double amin = cfg.area_min_px(frame.width(), frame.height());
    const double amax = cfg.area_max_px(frame.width(), frame.height());
    std::vector<Blob> kept;
    for (std::size_t i = 0; i < nb; ++i) {
        const Blob& b = comps.blobs[i];
        if (b.area < amin || b.area > amax || acc[i].n == 0) continue;
        const double h = acc[i].h / acc[i].n;
        const double s = acc[i].s / acc[i].n;
        const double v = acc[i].v / acc[i].n;
        if (h < cfg.hue_lo || h > cfg.hue_hi || s < cfg.sat_min || v < cfg.val_min) continue;
        kept.push_back(b);
    }
    return kept;
}

std::optional<BallDetection> select_ball(const std::vector<Blob>& blobs, const std::optional<Point2>& predicted,
                                         const DetectorConfig& cfg, int frame_index, int frame_width,
                                         int frame_height) {
    if (blobs.empty()) return std::nullopt;
    const Blob* best = nullptr;
    double score = 0.5;
    if (predicted) {
        double best_d = cfg.gate_radius;
        for (const Blob& b : blobs) {
            const double d = (b.centroid - *predicted).norm();
            if (d <= best_d && (best == nullptr || d < best_d)) {
                best = &b;
                best_d = d;
            }
        }
        if (best == nullptr) return std::nullopt;
        score = 1.0 - best_d / cfg.gate_radius;
    } else {
        const double mid = 0.5 * (cfg.area_min_px(frame_width, frame_height) + cfg.area_max_px(frame_width, frame_height));
        double best_gap = 0.0;
        for (const Blob& b : blobs) {
            const double gap = std::abs(b.area - mid);
            if (best == nullptr || gap < best_gap) {
                best = &b;
                best_gap = gap;
            }
        }
    }
    return BallDetection{frame_index, best->centroid, static_cast<double>(best->area), score};
}

// ---------------------------------------------------------------------------

BallDetector::BallDetector(int width, int height, DetectorConfig cfg)
    : cfg_(std::move(cfg)), model_(width, height, (cfg_.validate(), cfg_.background)) {}

std::optional<Point2> BallDetector::predict(int frame_index) const {
    if (recent_.empty()) return std::nullopt;
    const BallDetection& last = recent_.back();
    const int ahead = frame_index - last.frame_index;
    if (ahead > kPredictionHorizon) return std::nullopt;
    if (recent_.size() >= 2) {
        const BallDetection& prev = recent_[recent_.size() - 2];
        const int span = last.frame_index - prev.frame_index;
        if (span > 0 && span <= kPredictionHorizon) {
            const Point2 vel = (last.centroid - prev.centroid) / span;
            return Point2(last.centroid + vel * ahead);
        }
    }
    return last.centroid;
}

std::optional<BallDetection> BallDetector::process(const FrameImage& frame) {
    last_mask_ = model_.update(frame);
    ++frames_seen_;
    if (frames_seen_ <= cfg_.warmup_frames) return std::nullopt;

    const auto blobs = color_area_filter(frame, last_mask_, cfg_);
    auto det = select_ball(blobs, predict(frame.frame_index()), cfg_, frame.frame_index(), frame.width(),
                           frame.height());
    if (det) {
        recent_.push_back(*det);
        if (recent_.size() > 2) recent_.erase(recent_.begin());
    }
    return det;
}

}  // namespace elc
