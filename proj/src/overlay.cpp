#include "elc/overlay.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace elc {
namespace {

void put(FrameImage& img, int x, int y, synth::Rgb c) {
    if (!img.contains(x, y)) return;
    std::uint8_t* p = img.at(x, y);
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
}

void draw_segment(FrameImage& img, Point2 a, Point2 b, synth::Rgb c) {
    int x0 = static_cast<int>(std::lround(a.x()));
    int y0 = static_cast<int>(std::lround(a.y()));
    const int x1 = static_cast<int>(std::lround(b.x()));
    const int y1 = static_cast<int>(std::lround(b.y()));
    // Clip absurd spans, e.g. a curve shooting off-screen.
    if (std::abs(x1 - x0) > 8 * img.width() || std::abs(y1 - y0) > 8 * img.height()) return;
    const int dx = std::abs(x1 - x0);
    const int dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1;
    const int sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        put(img, x0, y0, c);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

struct Glyph {
    char ch;
    std::array<std::uint8_t, 7> rows;
};

constexpr std::array<Glyph, 25> kFont = {{
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}}, {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}}, {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}}, {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}}, {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}}, {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'+', {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00}}, {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}}, {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'N', {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11}}, {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}}, {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}}, {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
    {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}}, {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}},
    {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}}, {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}},
}};

const std::array<std::uint8_t, 7>& glyph(char ch) {
    static constexpr std::array<std::uint8_t, 7> kBox = {0x1F, 0x1F, 0x1F, 0x1F, 0x1F, 0x1F, 0x1F};
    for (const Glyph& g : kFont) {
        if (g.ch == ch) return g.rows;
    }
    return kBox;
}

// x at frame index u, from a line fitted to one phase's points.
LineFit<double> phase_x_fit(const PhaseLabeling& lab, const Assignment& asg, Phase which) {
    std::vector<double> t;
    std::vector<double> x;
    int j = 0;
    for (std::size_t i = 0; i < lab.size(); ++i) {
        Phase p = lab.labels[i];
        if (p == Phase::Uncertain) p = asg.phase(j++);
        if (p == which) {
            t.push_back(lab.frames[i]);
            x.push_back(lab.x[i]);
        }
    }
    using Map = Eigen::Map<const Eigen::VectorXd>;
    return fit_line(Map(t.data(), static_cast<Eigen::Index>(t.size())),
                    Map(x.data(), static_cast<Eigen::Index>(x.size())));
}

void draw_curve(FrameImage& img, const QuadraticFit<double>& fit, const PhaseLabeling& lab,
                const std::optional<LineFit<double>>& x_of_t) {
    if (lab.u.empty()) return;
    const auto [umin_it, umax_it] = std::minmax_element(lab.u.begin(), lab.u.end());
    const double umin = *umin_it;
    const double umax = *umax_it;
    // One-pixel abscissa steps in x mode; in t mode, steps that advance x by about a pixel.
    double step = 1.0;
    if (x_of_t) step = 1.0 / std::max(1.0, std::abs(x_of_t->slope));
    auto at = [&](double u) { return Point2(x_of_t ? (*x_of_t)(u) : u, fit(u)); };
    Point2 prev = at(umin);
    for (double u = umin + step; u < umax + 0.5 * step; u += step) {
        const Point2 cur = at(std::min(u, umax));
        draw_segment(img, prev, cur, kOverlayRed);
        prev = cur;
    }
}

}  // namespace

void draw_text(FrameImage& img, int x, int y, const std::string& text, synth::Rgb color, int scale) {
    int pen = x;
    for (char ch : text) {
        const auto& rows = glyph(ch);
        for (int r = 0; r < 7; ++r) {
            for (int c = 0; c < 5; ++c) {
                if (((rows[static_cast<std::size_t>(r)] >> (4 - c)) & 1) == 0) continue;
                for (int dy = 0; dy < scale; ++dy) {
                    for (int dx = 0; dx < scale; ++dx) put(img, pen + c * scale + dx, y + r * scale + dy, color);
                }
            }
        }
        pen += 6 * scale;
    }
}

FrameImage render_overlay(const FrameImage& frame, const Trajectory& window, const BouncePrediction& bounce,
                          const Verdict& verdict) {
    FrameImage img = frame;
    const PhaseLabeling& lab = bounce.labeling;

    if (!lab.u.empty()) {
        std::optional<LineFit<double>> xd;
        std::optional<LineFit<double>> xa;
        if (bounce.mode == AbscissaMode::T) {
            xd = phase_x_fit(lab, bounce.assignment, Phase::Descending);
            xa = phase_x_fit(lab, bounce.assignment, Phase::Ascending);
        }
        draw_curve(img, bounce.fits.descending, lab, xd);
        draw_curve(img, bounce.fits.ascending, lab, xa);
    }

    for (const BallDetection& det : window.points) {
        const int x = static_cast<int>(std::lround(det.centroid.x()));
        const int y = static_cast<int>(std::lround(det.centroid.y()));
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) put(img, x + dx, y + dy, kOverlayYellow);
        }
    }

    const int bx = static_cast<int>(std::lround(bounce.point.x()));
    const int by = static_cast<int>(std::lround(bounce.point.y()));
    for (int d = -5; d <= 5; ++d) {
        put(img, bx + d, by, kOverlayBlue);
        put(img, bx, by + d, kOverlayBlue);
    }
    // Centroid pixels stay yellow even under the cross.
    for (const BallDetection& det : window.points) {
        put(img, static_cast<int>(std::lround(det.centroid.x())), static_cast<int>(std::lround(det.centroid.y())),
            kOverlayYellow);
    }

    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s %+.1f PX", std::string(to_string(verdict.call)).c_str(), verdict.margin);
    std::string label = buf;
    if (!verdict.confident) label += " LOW CONF";
    const int scale = img.width() >= 320 ? 2 : 1;
    const int box_w = std::min(img.width(), static_cast<int>(label.size()) * 6 * scale + 4 * scale);
    const int box_h = std::min(img.height(), 11 * scale);
    for (int y = 0; y < box_h; ++y) {
        for (int x = 0; x < box_w; ++x) put(img, x, y, {0, 0, 0});
    }
    draw_text(img, 2 * scale, 2 * scale, label, {255, 255, 255}, scale);
    return img;
}

}  // namespace elc
