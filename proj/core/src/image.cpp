#include "lodcheck/image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace lodcheck {

Image make_image(int width, int height, float r, float g, float b) {
    Image img;
    img.width = width;
    img.height = height;
    img.data.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i < img.data.size(); i += 3) {
        img.data[i] = r;
        img.data[i + 1] = g;
        img.data[i + 2] = b;
    }
    return img;
}

std::uint8_t quantize8(float v) {
    if (v <= 0.0f) return 0;
    if (v >= 1.0f) return 255;
    return static_cast<std::uint8_t>(std::lround(v * 255.0f));
}

void save_ppm(const Image& img, const std::filesystem::path& path) {
    if (img.width <= 0 || img.height <= 0 ||
        img.data.size() != static_cast<std::size_t>(img.width) * img.height * 3)
        throw std::runtime_error("save_ppm: inconsistent image dimensions");
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    std::fprintf(f, "P6\n%d %d\n255\n", img.width, img.height);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width) * 3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c)
                row[static_cast<std::size_t>(x) * 3 + c] = quantize8(img.at(x, y, c));
        if (std::fwrite(row.data(), 1, row.size(), f) != row.size()) {
            std::fclose(f);
            throw std::runtime_error("write failed: " + path.string());
        }
    }
    if (std::fclose(f) != 0)
        throw std::runtime_error("write failed: " + path.string());
}

namespace {

// Reads one whitespace-delimited token, skipping '#' comment lines.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

} // namespace

ImageU8 load_ppm_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open PPM file: " + path.string());
    if (next_token(in) != "P6")
        throw std::runtime_error(path.string() + ": not a binary PPM (P6) file");
    int width = 0, height = 0, maxval = 0;
    try {
        width = std::stoi(next_token(in));
        height = std::stoi(next_token(in));
        maxval = std::stoi(next_token(in));
    } catch (const std::exception&) {
        throw std::runtime_error(path.string() + ": malformed PPM header");
    }
    if (width <= 0 || height <= 0 || maxval != 255)
        throw std::runtime_error(path.string() + ": unsupported PPM header");

    ImageU8 img;
    img.width = width;
    img.height = height;
    const std::size_t n = static_cast<std::size_t>(width) * height * 3;
    img.data.resize(n);
    in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw std::runtime_error(path.string() + ": truncated PPM data");
    return img;
}

Image load_ppm(const std::filesystem::path& path) {
    const ImageU8 bytes = load_ppm_bytes(path);
    Image img;
    img.width = bytes.width;
    img.height = bytes.height;
    img.data.resize(bytes.data.size());
    for (std::size_t i = 0; i < bytes.data.size(); ++i)
        img.data[i] = static_cast<float>(bytes.data[i]) / 255.0f;
    return img;
}

} // namespace lodcheck
