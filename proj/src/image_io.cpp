#include "elc/image_io.hpp"

#include <png.h>

#include <array>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "elc/error.hpp"

namespace elc {
namespace {

[[noreturn]] void undecodable(const std::filesystem::path& path, const std::string& why) {
    throw Error(ErrorCode::UndecodableFrame, path.string() + ": " + why);
}

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) undecodable(path, "cannot open");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

FrameImage decode_png(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        undecodable(path, image.message);
    }
    image.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
    // Alpha is composited onto black by libpng and thereby discarded.
    if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        undecodable(path, msg);
    }
    const int w = static_cast<int>(image.width);
    const int h = static_cast<int>(image.height);
    try {
        return FrameImage(w, h, std::move(pixels));
    } catch (const Error& e) {
        undecodable(path, e.what());
    }
}

// P6 tokens may be separated by whitespace and '#' comments.
FrameImage decode_ppm(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::size_t pos = 2;
    auto next_int = [&]() -> long {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
        long v = 0;
        bool any = false;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos] - '0');
            if (v > 1'000'000) undecodable(path, "PPM header value too large");
            ++pos;
            any = true;
        }
        if (!any) undecodable(path, "malformed PPM header");
        return v;
    };
    const long w = next_int();
    const long h = next_int();
    const long maxval = next_int();
    if (maxval != 255) undecodable(path, "only 8-bit PPM supported");
    ++pos;  // single whitespace before raster
    const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
    if (pos + need > bytes.size()) undecodable(path, "truncated PPM raster");
    std::vector<std::uint8_t> pixels(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                     bytes.begin() + static_cast<std::ptrdiff_t>(pos + need));
    try {
        return FrameImage(static_cast<int>(w), static_cast<int>(h), std::move(pixels));
    } catch (const Error& e) {
        undecodable(path, e.what());
    }
}

}  // namespace

FrameImage read_image(const std::filesystem::path& path) {
    const auto bytes = read_all(path);
    static constexpr std::array<std::uint8_t, 8> kPngSig = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    if (bytes.size() >= kPngSig.size() && std::equal(kPngSig.begin(), kPngSig.end(), bytes.begin())) {
        return decode_png(path, bytes);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') {
        return decode_ppm(path, bytes);
    }
    undecodable(path, "unrecognized image format");
}

void write_png(const std::filesystem::path& path, const FrameImage& frame) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(frame.width());
    image.height = static_cast<png_uint_32>(frame.height());
    image.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, frame.pixels().data(), 0, nullptr)) {
        throw Error(ErrorCode::IoError, path.string() + ": " + image.message);
    }
}

void write_ppm(const std::filesystem::path& path, const FrameImage& frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << "P6\n" << frame.width() << ' ' << frame.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels().data()),
              static_cast<std::streamsize>(frame.pixels().size()));
    if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

}  // namespace elc
