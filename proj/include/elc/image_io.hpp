#pragma once

#include <filesystem>

#include "elc/imaging.hpp"

namespace elc {

/// Decodes PNG (RGB/RGBA/gray, alpha discarded) or binary PPM (P6, maxval 255),
/// chosen by file signature. Throws UndecodableFrame naming the file.
[[nodiscard]] FrameImage read_image(const std::filesystem::path& path);

/// Throws IoError.
void write_png(const std::filesystem::path& path, const FrameImage& image);
void write_ppm(const std::filesystem::path& path, const FrameImage& image);

}  // namespace elc
