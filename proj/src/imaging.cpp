#include "elc/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

#include "elc/error.hpp"
#include "elc/image_io.hpp"

namespace elc {

FrameImage::FrameImage(int width, int height, std::vector<std::uint8_t> pixels, int frame_index,
                       double timestamp)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width < kMinSide || height < kMinSide) {
        throw Error(ErrorCode::InvalidImage, "frame must be at least 16x16, got " +
                                                 std::to_string(width) + "x" + std::to_string(height));
    }
    if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3) {
        throw Error(ErrorCode::InvalidImage, "pixel buffer size does not match dimensions");
    }
    set_position(frame_index, timestamp);
}

FrameImage::FrameImage(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b,
                       int frame_index, double timestamp)
    : FrameImage(width, height,
                 std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                           static_cast<std::size_t>(std::max(height, 0)) * 3),
                 frame_index, timestamp) {
    for (std::size_t i = 0; i < pixels_.size(); i += 3) {
        pixels_[i] = r;
        pixels_[i + 1] = g;
        pixels_[i + 2] = b;
    }
}

void FrameImage::set_position(int frame_index, double timestamp) {
    if (frame_index < 0) throw Error(ErrorCode::InvalidImage, "negative frame index");
    frame_index_ = frame_index;
    timestamp_ = timestamp;
}

BinaryMask::BinaryMask(int width, int height, bool value)
    : width_(width),
      height_(height),
      bits_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), value ? 1 : 0) {}

std::size_t BinaryMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Hsv rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) noexcept {
    const double r = r8 / 255.0;
    const double g = g8 / 255.0;
    const double b = b8 / 255.0;
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;

    Hsv out;
    out.v = mx;
    out.s = mx > 0.0 ? delta / mx : 0.0;
    if (delta <= 0.0) return out;

    double h;
    if (r8 >= g8 && r8 >= b8) {
        h = 60.0 * ((g - b) / delta);
    } else if (g8 >= b8) {
        h = 60.0 * ((b - r) / delta) + 120.0;
    } else {
        h = 60.0 * ((r - g) / delta) + 240.0;
    }
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
    out.h = h;
    return out;
}

namespace {

// Separable (2r+1) window passes over raw mask bytes. Erode sets a pixel iff
// every in-bounds pixel in the window is set, dilate iff any is.
void row_pass(const std::uint8_t* in, std::uint8_t* out, int w, int h, int r, bool erode) {
    std::vector<int> prefix(static_cast<std::size_t>(w) + 1);
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* src = in + static_cast<std::size_t>(y) * w;
        std::uint8_t* dst = out + static_cast<std::size_t>(y) * w;
        prefix[0] = 0;
        for (int x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + src[x];
        if (prefix[w] == 0) {
            std::fill(dst, dst + w, 0);
            continue;
        }
        for (int x = 0; x < w; ++x) {
            const int lo = std::max(0, x - r);
            const int hi = std::min(w - 1, x + r);
            const int ones = prefix[hi + 1] - prefix[lo];
            dst[x] = erode ? (ones == hi - lo + 1) : (ones > 0);
        }
    }
}

void column_pass(const std::uint8_t* in, std::uint8_t* out, int w, int h, int r, bool erode) {
    // Running per-column counts over the rows [y - r, y + r].
    std::vector<int> count(static_cast<std::size_t>(w), 0);
    auto add_row = [&](int y, int sign) {
        const std::uint8_t* src = in + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) count[x] += sign * src[x];
    };
    for (int y = 0; y < std::min(h, r); ++y) add_row(y, 1);
    for (int y = 0; y < h; ++y) {
        if (y + r < h) add_row(y + r, 1);
        if (y - r - 1 >= 0) add_row(y - r - 1, -1);
        const int span = std::min(h - 1, y + r) - std::max(0, y - r) + 1;
        std::uint8_t* dst = out + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) dst[x] = erode ? (count[x] == span) : (count[x] > 0);
    }
}

BinaryMask square_op(const BinaryMask& m, int r, bool erode) {
    const int w = m.width();
    const int h = m.height();
    BinaryMask tmp(w, h);
    BinaryMask out(w, h);
    row_pass(m.bits().data(), tmp.bits().data(), w, h, r, erode);
    column_pass(tmp.bits().data(), out.bits().data(), w, h, r, erode);
    return out;
}

}  // namespace

BinaryMask morph_open_dilate(const BinaryMask& mask, int radius) {
    if (radius < 0) throw Error(ErrorCode::InvalidConfig, "morphology radius must be >= 0");
    if (radius == 0) return mask;
    BinaryMask m = square_op(mask, radius, true);
    m = square_op(m, radius, false);
    return square_op(m, radius, false);
}

ComponentLabels label_components(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    ComponentLabels out;
    out.labels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), -1);

    std::vector<int> stack;
    for (int y0 = 0; y0 < h; ++y0) {
        for (int x0 = 0; x0 < w; ++x0) {
            const std::size_t seed = static_cast<std::size_t>(y0) * w + x0;
            if (!mask.get(x0, y0) || out.labels[seed] >= 0) continue;

            const int label = static_cast<int>(out.blobs.size());
            Blob blob;
            blob.bbox = {x0, y0, x0, y0};
            double sx = 0.0;
            double sy = 0.0;
            out.labels[seed] = label;
            stack.assign(1, static_cast<int>(seed));
            while (!stack.empty()) {
                const int idx = stack.back();
                stack.pop_back();
                const int x = idx % w;
                const int y = idx / w;
                ++blob.area;
                sx += x;
                sy += y;
                blob.bbox.min_x = std::min(blob.bbox.min_x, x);
                blob.bbox.max_x = std::max(blob.bbox.max_x, x);
                blob.bbox.min_y = std::min(blob.bbox.min_y, y);
                blob.bbox.max_y = std::max(blob.bbox.max_y, y);
                for (int dy = -1; dy <= 1; ++dy) {
                    const int ny = y + dy;
                    if (ny < 0 || ny >= h) continue;
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = x + dx;
                        if ((dx == 0 && dy == 0) || nx < 0 || nx >= w) continue;
                        const std::size_t n = static_cast<std::size_t>(ny) * w + nx;
                        if (mask.get(nx, ny) && out.labels[n] < 0) {
                            out.labels[n] = label;
                            stack.push_back(static_cast<int>(n));
                        }
                    }
                }
            }
            blob.centroid = Point2(sx / blob.area, sy / blob.area);
            out.blobs.push_back(blob);
        }
    }
    return out;
}

std::vector<Blob> connected_components(const BinaryMask& mask) {
    return label_components(mask).blobs;
}

// ---------------------------------------------------------------------------
// Frame sequences

namespace {

struct ParsedPattern {
    std::string prefix;
    std::string suffix;
    int width = 0;
    bool zero_pad = false;
};

ParsedPattern parse_pattern(const std::string& pattern) {
    static const std::regex spec(R"(%(0?)(\d*)d)");
    std::smatch m;
    if (!std::regex_search(pattern, m, spec)) {
        throw Error(ErrorCode::InvalidConfig, "frame pattern needs one %d field: " + pattern);
    }
    ParsedPattern p;
    p.prefix = m.prefix().str();
    p.suffix = m.suffix().str();
    p.zero_pad = !m[1].str().empty();
    p.width = m[2].str().empty() ? 0 : std::stoi(m[2].str());
    if (p.suffix.find('%') != std::string::npos || p.prefix.find('%') != std::string::npos) {
        throw Error(ErrorCode::InvalidConfig, "frame pattern has more than one field: " + pattern);
    }
    return p;
}

std::string regex_escape(const std::string& s) {
    static const std::regex special(R"([.^$|()\[\]{}*+?\\])");
    return std::regex_replace(s, special, R"(\$&)");
}

}  // namespace

std::string format_frame_name(const std::string& pattern, int index) {
    const ParsedPattern p = parse_pattern(pattern);
    std::string digits = std::to_string(index);
    if (static_cast<int>(digits.size()) < p.width) {
        digits.insert(0, static_cast<std::size_t>(p.width) - digits.size(), p.zero_pad ? '0' : ' ');
    }
    return p.prefix + digits + p.suffix;
}

FrameListing list_frames(const std::filesystem::path& dir, const std::string& pattern) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        throw Error(ErrorCode::MissingDirectory, dir.string());
    }
    const ParsedPattern p = parse_pattern(pattern);
    const std::regex name_re(regex_escape(p.prefix) + R"(\s*(\d+))" + regex_escape(p.suffix));

    std::vector<std::pair<int, fs::path>> found;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        std::smatch m;
        if (std::regex_match(name, m, name_re)) {
            found.emplace_back(std::stoi(m[1].str()), entry.path());
        }
    }
    if (found.empty()) {
        throw Error(ErrorCode::MissingFrames, "no files matching " + pattern + " in " + dir.string());
    }
    std::sort(found.begin(), found.end());

    FrameListing listing;
    for (std::size_t i = 0; i < found.size(); ++i) {
        if (i > 0) {
            if (found[i].first == found[i - 1].first) {
                throw Error(ErrorCode::BadInput, "duplicate frame index " + std::to_string(found[i].first));
            }
            if (found[i].first > found[i - 1].first + 1) {
                listing.gaps.emplace_back(found[i - 1].first + 1, found[i].first - 1);
            }
        }
        listing.indices.push_back(found[i].first);
        listing.files.push_back(found[i].second);
    }
    return listing;
}

FrameImage load_listed_frame(const FrameListing& listing, std::size_t i, double fps) {
    FrameImage frame = read_image(listing.files.at(i));
    const int index = listing.indices.at(i);
    frame.set_position(index, index / fps);
    return frame;
}

FrameSequence load_frame_sequence(const std::filesystem::path& dir, const std::string& pattern, double fps) {
    if (!(fps > 0.0)) throw Error(ErrorCode::InvalidConfig, "fps must be positive");
    const FrameListing listing = list_frames(dir, pattern);
    FrameSequence seq;
    seq.gaps = listing.gaps;
    seq.frames.reserve(listing.files.size());
    for (std::size_t i = 0; i < listing.files.size(); ++i) {
        FrameImage frame = load_listed_frame(listing, i, fps);
        if (!seq.frames.empty() && (frame.width() != seq.frames.front().width() ||
                                    frame.height() != seq.frames.front().height())) {
            throw Error(ErrorCode::MixedDimensions, listing.files[i].string());
        }
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

}  // namespace elc
