#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace memesent {

/// 8-bit interleaved RGB, row-major.
struct RgbImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;  // height * width * 3

    std::uint8_t at(std::size_t y, std::size_t x, std::size_t c) const { return pixels[(y * width + x) * 3 + c]; }
};

inline constexpr std::size_t kHsvSide = 32;

/// H x W x 3 tensor, row-major with interleaved channels. Hue lies in
/// [0, 1), saturation and value in [0, 1].
struct HsvTensor {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<float> values;

    float at(std::size_t y, std::size_t x, std::size_t c) const { return values[(y * width + x) * 3 + c]; }
    float& at(std::size_t y, std::size_t x, std::size_t c) { return values[(y * width + x) * 3 + c]; }

    friend bool operator==(const HsvTensor&, const HsvTensor&) = default;
};

/// r, g, b in [0, 1] -> (h, s, v) with h in [0, 1). Gray (max == min) has h = s = 0.
std::array<double, 3> rgb_to_hsv(double r, double g, double b) noexcept;

/// Bilinear resampling with pixel-centre alignment; output channels stay in
/// [0, 255] as doubles.
std::vector<double> resize_bilinear(const RgbImage& image, std::size_t out_h, std::size_t out_w);

/// Bilinear downsample to 32x32, then per-pixel RGB -> HSV.
HsvTensor hsv_from_image(const RgbImage& image);

/// Tensor file: ASCII header "H W 3\n" followed by H*W*3 little-endian float32.
std::vector<std::uint8_t> format_hsv_tensor(const HsvTensor& tensor);
HsvTensor parse_hsv_tensor(std::span<const std::uint8_t> bytes);
void write_hsv_tensor(const HsvTensor& tensor, const std::filesystem::path& path);
HsvTensor read_hsv_tensor(const std::filesystem::path& path);

/// Decodes PNG or JPEG (by signature) to 8-bit RGB.
RgbImage decode_image(std::span<const std::uint8_t> bytes);
RgbImage load_image(const std::filesystem::path& path);
/// 8-bit RGB PNG encoder, used for fixtures and tooling.
std::vector<std::uint8_t> encode_png(const RgbImage& image);

/// ".hsv" files are read as tensors; anything else is decoded as an image.
HsvTensor load_hsv_input(const std::filesystem::path& path);

}  // namespace memesent
