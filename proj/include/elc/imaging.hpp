#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace elc {

using Point2 = Eigen::Vector2d;

/// Row-major 8-bit RGB raster with its position in the capture.
class FrameImage {
public:
    static constexpr int kMinSide = 16;

    FrameImage() = default;
    /// Throws InvalidImage unless width, height >= kMinSide and the buffer
    /// holds exactly width * height * 3 bytes.
    FrameImage(int width, int height, std::vector<std::uint8_t> pixels, int frame_index = 0,
               double timestamp = 0.0);
    /// Uniformly filled frame.
    FrameImage(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b,
               int frame_index = 0, double timestamp = 0.0);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] int frame_index() const noexcept { return frame_index_; }
    [[nodiscard]] double timestamp() const noexcept { return timestamp_; }
    void set_position(int frame_index, double timestamp);

    [[nodiscard]] std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
    [[nodiscard]] std::span<std::uint8_t> pixels() noexcept { return pixels_; }

    [[nodiscard]] const std::uint8_t* at(int x, int y) const noexcept {
        return pixels_.data() + (static_cast<std::size_t>(y) * width_ + x) * 3;
    }
    [[nodiscard]] std::uint8_t* at(int x, int y) noexcept {
        return pixels_.data() + (static_cast<std::size_t>(y) * width_ + x) * 3;
    }
    [[nodiscard]] bool contains(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
    int frame_index_ = 0;
    double timestamp_ = 0.0;
};

/// One flag per pixel, row-major.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool value = false);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] bool get(int x, int y) const noexcept {
        return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
    }
    void set(int x, int y, bool v = true) noexcept {
        bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
    }
    [[nodiscard]] std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    [[nodiscard]] std::span<std::uint8_t> bits() noexcept { return bits_; }
    [[nodiscard]] std::size_t count() const noexcept;

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

struct BoundingBox {
    int min_x = 0;
    int min_y = 0;
    int max_x = 0;
    int max_y = 0;
};

/// Connected foreground region. Pixel (x, y) has its center at integer (x, y).
struct Blob {
    int area = 0;
    Point2 centroid = Point2::Zero();
    BoundingBox bbox;
};

struct Hsv {
    double h = 0.0;  // degrees, [0, 360)
    double s = 0.0;  // [0, 1]
    double v = 0.0;  // [0, 1]
};

/// Hexcone conversion; hue is 0 for achromatic input.
[[nodiscard]] Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;

/// Erode then dilate with a (2r+1)-square, then dilate once more with the same
/// square. Pixels outside the mask do not participate. Radius 0 is identity.
[[nodiscard]] BinaryMask morph_open_dilate(const BinaryMask& mask, int radius);

/// Per-pixel component label (-1 for background) plus blob statistics, blobs
/// ordered by their first pixel in raster order. 8-connected.
struct ComponentLabels {
    std::vector<int> labels;
    std::vector<Blob> blobs;
};

[[nodiscard]] ComponentLabels label_components(const BinaryMask& mask);
[[nodiscard]] std::vector<Blob> connected_components(const BinaryMask& mask);

/// Numbered frame files discovered on disk.
struct FrameListing {
    std::vector<std::filesystem::path> files;
    std::vector<int> indices;  // ascending
    /// Missing index ranges [first, last] between consecutive files.
    std::vector<std::pair<int, int>> gaps;
};

struct FrameSequence {
    std::vector<FrameImage> frames;
    std::vector<std::pair<int, int>> gaps;
};

/// Finds files matching a printf-style template with one integer field
/// (e.g. `frame_%06d.png`). Throws MissingDirectory / MissingFrames.
[[nodiscard]] FrameListing list_frames(const std::filesystem::path& dir,
                                       const std::string& pattern = "frame_%06d.png");

/// Loads one listed frame and stamps index and timestamp = index / fps.
[[nodiscard]] FrameImage load_listed_frame(const FrameListing& listing, std::size_t i, double fps);

/// Eager load of the whole sequence; enforces identical dimensions.
[[nodiscard]] FrameSequence load_frame_sequence(const std::filesystem::path& dir,
                                                const std::string& pattern, double fps);

/// Expands the template for a given index.
[[nodiscard]] std::string format_frame_name(const std::string& pattern, int index);

}  // namespace elc
