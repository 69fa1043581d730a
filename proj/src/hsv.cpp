#include "memesent/hsv.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <string>

#include "memesent/binary_io.hpp"
#include "memesent/errors.hpp"

namespace memesent {

std::array<double, 3> rgb_to_hsv(double r, double g, double b) noexcept {
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;
    double h = 0.0;
    if (delta > 0.0) {
        if (mx == r) {
            h = std::fmod((g - b) / delta, 6.0);
            if (h < 0.0) h += 6.0;
        } else if (mx == g) {
            h = (b - r) / delta + 2.0;
        } else {
            h = (r - g) / delta + 4.0;
        }
        h /= 6.0;
        if (h >= 1.0) h -= 1.0;
    }
    const double s = mx > 0.0 ? delta / mx : 0.0;
    return {h, s, mx};
}

std::vector<double> resize_bilinear(const RgbImage& image, std::size_t out_h, std::size_t out_w) {
    if (image.width == 0 || image.height == 0) throw ValidationError("image has zero dimensions");
    if (image.pixels.size() != image.width * image.height * 3) {
        throw ValidationError("image pixel buffer does not match its dimensions");
    }
    std::vector<double> out(out_h * out_w * 3);
    const double sy = static_cast<double>(image.height) / static_cast<double>(out_h);
    const double sx = static_cast<double>(image.width) / static_cast<double>(out_w);
    const auto max_y = static_cast<double>(image.height - 1);
    const auto max_x = static_cast<double>(image.width - 1);
    for (std::size_t oy = 0; oy < out_h; ++oy) {
        const double fy = std::clamp((static_cast<double>(oy) + 0.5) * sy - 0.5, 0.0, max_y);
        const auto y0 = static_cast<std::size_t>(fy);
        const std::size_t y1 = std::min(y0 + 1, image.height - 1);
        const double wy = fy - static_cast<double>(y0);
        for (std::size_t ox = 0; ox < out_w; ++ox) {
            const double fx = std::clamp((static_cast<double>(ox) + 0.5) * sx - 0.5, 0.0, max_x);
            const auto x0 = static_cast<std::size_t>(fx);
            const std::size_t x1 = std::min(x0 + 1, image.width - 1);
            const double wx = fx - static_cast<double>(x0);
            for (std::size_t c = 0; c < 3; ++c) {
                const double top = (1.0 - wx) * image.at(y0, x0, c) + wx * image.at(y0, x1, c);
                const double bottom = (1.0 - wx) * image.at(y1, x0, c) + wx * image.at(y1, x1, c);
                out[(oy * out_w + ox) * 3 + c] = (1.0 - wy) * top + wy * bottom;
            }
        }
    }
    return out;
}

HsvTensor hsv_from_image(const RgbImage& image) {
    const auto rgb = resize_bilinear(image, kHsvSide, kHsvSide);
    HsvTensor t{kHsvSide, kHsvSide, std::vector<float>(kHsvSide * kHsvSide * 3)};
    for (std::size_t i = 0; i < kHsvSide * kHsvSide; ++i) {
        const auto hsv = rgb_to_hsv(rgb[i * 3] / 255.0, rgb[i * 3 + 1] / 255.0, rgb[i * 3 + 2] / 255.0);
        for (std::size_t c = 0; c < 3; ++c) t.values[i * 3 + c] = static_cast<float>(hsv[c]);
        // float rounding may lift a hue just below 1 onto 1
        if (t.values[i * 3] >= 1.0f) t.values[i * 3] = 0.0f;
    }
    return t;
}

std::vector<std::uint8_t> format_hsv_tensor(const HsvTensor& tensor) {
    const std::string header = std::to_string(tensor.height) + " " + std::to_string(tensor.width) + " 3\n";
    ByteWriter w;
    w.raw({reinterpret_cast<const std::uint8_t*>(header.data()), header.size()});
    for (float v : tensor.values) w.f32(v);
    return w.take();
}

HsvTensor parse_hsv_tensor(std::span<const std::uint8_t> bytes) {
    const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    const auto nl = text.find('\n');
    if (nl == std::string_view::npos || nl > 64) throw FormatError("hsv tensor: missing header");
    std::size_t dims[3] = {0, 0, 0};
    const char* p = text.data();
    const char* end = text.data() + nl;
    for (auto& d : dims) {
        while (p < end && *p == ' ') ++p;
        auto [next, ec] = std::from_chars(p, end, d);
        if (ec != std::errc{}) throw FormatError("hsv tensor: malformed header");
        p = next;
    }
    while (p < end && (*p == ' ' || *p == '\r')) ++p;
    if (p != end || dims[2] != 3 || dims[0] == 0 || dims[1] == 0) {
        throw FormatError("hsv tensor: header must be \"H W 3\"");
    }
    const std::size_t count = dims[0] * dims[1] * 3;
    ByteReader r(bytes.subspan(nl + 1));
    if (r.remaining() != count * 4) {
        throw FormatError("hsv tensor: expected " + std::to_string(count * 4) + " data bytes, found " +
                          std::to_string(r.remaining()));
    }
    HsvTensor t{dims[0], dims[1], std::vector<float>(count)};
    for (std::size_t i = 0; i < count; ++i) {
        const float v = r.f32();
        const bool hue = i % 3 == 0;
        if (!(v >= 0.0f) || (hue ? !(v < 1.0f) : !(v <= 1.0f))) {
            throw FormatError("hsv tensor: component " + std::to_string(i) + " out of range");
        }
        t.values[i] = v;
    }
    return t;
}

void write_hsv_tensor(const HsvTensor& tensor, const std::filesystem::path& path) {
    write_file_bytes(path, format_hsv_tensor(tensor));
}

HsvTensor read_hsv_tensor(const std::filesystem::path& path) { return parse_hsv_tensor(read_file_bytes(path)); }

HsvTensor load_hsv_input(const std::filesystem::path& path) {
    if (path.extension() == ".hsv") {
        auto t = read_hsv_tensor(path);
        if (t.height != kHsvSide || t.width != kHsvSide) {
            throw FormatError("hsv tensor " + path.string() + " is " + std::to_string(t.height) + "x" +
                              std::to_string(t.width) + ", expected 32x32");
        }
        return t;
    }
    return hsv_from_image(load_image(path));
}

}  // namespace memesent
