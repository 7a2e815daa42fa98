#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace lodcheck {

/// Row-major RGB image with values in [0,1].
struct Image {
    int width = 0;
    int height = 0;
    std::vector<float> data; // width * height * 3

    float& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    float at(int x, int y, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
};

Image make_image(int width, int height, float r, float g, float b);

/// Binary PPM (P6, maxval 255). Writes a canonical header so identical
/// images produce byte-identical files.
void save_ppm(const Image& img, const std::filesystem::path& path);

/// Throws on malformed or truncated files.
Image load_ppm(const std::filesystem::path& path);

/// 8-bit quantization used by save_ppm, exposed for tests.
std::uint8_t quantize8(float v);

/// Raw 8-bit variant used by the training sample cache.
struct ImageU8 {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data; // interleaved RGB
};

ImageU8 load_ppm_bytes(const std::filesystem::path& path);

} // namespace lodcheck
