#pragma once

#include <filesystem>

#include "elc/bounce.hpp"
#include "elc/linecall.hpp"
#include "elc/synth.hpp"

namespace elc {

inline constexpr synth::Rgb kOverlayYellow = {255, 255, 0};
inline constexpr synth::Rgb kOverlayRed = {255, 0, 0};
inline constexpr synth::Rgb kOverlayBlue = {0, 0, 255};

/// Detections as yellow dots, both fitted curves as red polylines, the bounce
/// as a blue cross and the call with its margin stamped top-left.
[[nodiscard]] FrameImage render_overlay(const FrameImage& frame, const Trajectory& window,
                                        const BouncePrediction& bounce, const Verdict& verdict);

/// Draws `text` (digits, + - . and the letters of IN/OUT/PX/LOW/CONF) with a
/// 5x7 font at integer `scale`. Unknown glyphs render as a filled box.
void draw_text(FrameImage& img, int x, int y, const std::string& text, synth::Rgb color, int scale = 1);

}  // namespace elc
