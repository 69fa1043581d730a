#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <csetjmp>

#include <jpeglib.h>

#include "memesent/rng.hpp"
#include "memesent/binary_io.hpp"
#include "memesent/hsv.hpp"
#include "synthetic.hpp"

using namespace memesent;
using memesent::testing::TempDir;

namespace {

RgbImage solid(std::size_t w, std::size_t h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    RgbImage img{w, h, {}};
    for (std::size_t i = 0; i < w * h; ++i) img.pixels.insert(img.pixels.end(), {r, g, b});
    return img;
}

std::vector<std::uint8_t> encode_jpeg(const RgbImage& img) {
    jpeg_compress_struct c{};
    jpeg_error_mgr err{};
    c.err = jpeg_std_error(&err);
    jpeg_create_compress(&c);
    unsigned char* buf = nullptr;
    unsigned long size = 0;
    jpeg_mem_dest(&c, &buf, &size);
    c.image_width = static_cast<JDIMENSION>(img.width);
    c.image_height = static_cast<JDIMENSION>(img.height);
    c.input_components = 3;
    c.in_color_space = JCS_RGB;
    jpeg_set_defaults(&c);
    jpeg_set_quality(&c, 95, TRUE);
    jpeg_start_compress(&c, TRUE);
    while (c.next_scanline < c.image_height) {
        auto* row = const_cast<JSAMPLE*>(img.pixels.data() + c.next_scanline * img.width * 3);
        jpeg_write_scanlines(&c, &row, 1);
    }
    jpeg_finish_compress(&c);
    std::vector<std::uint8_t> out(buf, buf + size);
    jpeg_destroy_compress(&c);
    std::free(buf);
    return out;
}

}  // namespace

TEST_CASE("analytic hsv values") {
    CHECK(rgb_to_hsv(1, 0, 0) == std::array<double, 3>{0, 1, 1});
    CHECK(rgb_to_hsv(0, 1, 0) == std::array<double, 3>{1.0 / 3.0, 1, 1});
    CHECK(rgb_to_hsv(0, 0, 1) == std::array<double, 3>{2.0 / 3.0, 1, 1});
    CHECK(rgb_to_hsv(0.5, 0.5, 0.5) == std::array<double, 3>{0, 0, 0.5});
    CHECK(rgb_to_hsv(0, 0, 0) == std::array<double, 3>{0, 0, 0});
    const auto h = rgb_to_hsv(0, 128 / 255.0, 1);
    CHECK(h[0] == doctest::Approx(0.5830).epsilon(1e-4));
    CHECK(h[1] == 1.0);
    CHECK(h[2] == 1.0);
    const auto m = rgb_to_hsv(1, 0, 0.2);
    CHECK(m[0] < 1.0);
    CHECK(m[0] > 0.9);
}

TEST_CASE("hsv ranges on random colours") {
    auto rng = CounterRng::stream(1, "hsv");
    for (int i = 0; i < 5000; ++i) {
        const double r = rng.uniform01(), g = rng.uniform01(), b = rng.uniform01();
        const auto h = rgb_to_hsv(r, g, b);
        CHECK(h[0] >= 0.0);
        CHECK(h[0] < 1.0);
        CHECK(h[1] >= 0.0);
        CHECK(h[1] <= 1.0);
        CHECK(h[2] == std::max({r, g, b}));
    }
    const auto gray = rgb_to_hsv(0.3, 0.3, 0.3);
    CHECK(gray[1] == 0.0);
}

TEST_CASE("solid images map to solid tensors") {
    const auto t = hsv_from_image(solid(50, 17, 255, 0, 0));
    CHECK(t.height == 32);
    CHECK(t.width == 32);
    for (std::size_t y = 0; y < 32; ++y) {
        for (std::size_t x = 0; x < 32; ++x) {
            CHECK(t.at(y, x, 0) == 0.0f);
            CHECK(t.at(y, x, 1) == 1.0f);
            CHECK(t.at(y, x, 2) == 1.0f);
        }
    }
    const auto g = hsv_from_image(solid(3, 3, 90, 90, 90));
    for (std::size_t i = 1; i < g.values.size(); i += 3) CHECK(g.values[i] == 0.0f);
    CHECK_THROWS_AS(hsv_from_image(RgbImage{}), ValidationError);
}

TEST_CASE("bilinear resize with pixel centres") {
    RgbImage img{2, 1, {0, 0, 0, 255, 255, 255}};
    const auto out = resize_bilinear(img, 1, 4);
    REQUIRE(out.size() == 12);
    CHECK(out[0] == 0.0);
    CHECK(out[3] == doctest::Approx(63.75));
    CHECK(out[6] == doctest::Approx(191.25));
    CHECK(out[9] == 255.0);
    const auto same = resize_bilinear(img, 1, 2);
    CHECK(same == std::vector<double>{0, 0, 0, 255, 255, 255});
}

TEST_CASE("tensor file round trip and validation") {
    TempDir dir;
    const auto t = memesent::testing::class_colour_tensor(Sentiment::Neutral, 3);
    write_hsv_tensor(t, dir / "x.hsv");
    CHECK(read_hsv_tensor(dir / "x.hsv") == t);
    CHECK(load_hsv_input(dir / "x.hsv") == t);

    auto bytes = format_hsv_tensor(t);
    bytes.pop_back();
    CHECK_THROWS_AS(parse_hsv_tensor(bytes), FormatError);

    auto bad = t;
    bad.values[0] = 1.0f;
    CHECK_THROWS_AS(parse_hsv_tensor(format_hsv_tensor(bad)), FormatError);

    HsvTensor small{2, 2, std::vector<float>(12, 0.5f)};
    write_hsv_tensor(small, dir / "small.hsv");
    CHECK_THROWS_WITH_AS(load_hsv_input(dir / "small.hsv"), doctest::Contains("expected 32x32"), FormatError);
}

TEST_CASE("png decode round trip") {
    TempDir dir;
    const auto img = memesent::testing::class_colour_image(Sentiment::Positive, 2, 40);
    write_file_bytes(dir / "p.png", encode_png(img));
    const auto back = load_image(dir / "p.png");
    CHECK(back.width == 40);
    CHECK(back.height == 40);
    CHECK(back.pixels == img.pixels);
    CHECK(load_hsv_input(dir / "p.png") == hsv_from_image(img));
}

TEST_CASE("jpeg decode") {
    const auto img = solid(24, 16, 0, 0, 255);
    const auto back = decode_image(encode_jpeg(img));
    CHECK(back.width == 24);
    CHECK(back.height == 16);
    for (std::size_t i = 0; i < back.pixels.size(); i += 3) {
        CHECK(back.pixels[i] <= 4);
        CHECK(back.pixels[i + 2] >= 250);
    }
    auto broken = encode_jpeg(img);
    broken.resize(broken.size() / 3);
    CHECK_THROWS(decode_image(broken));
}

TEST_CASE("undecodable input") {
    const std::vector<std::uint8_t> junk = {'n', 'o', 't', ' ', 'a', 'n', ' ', 'i', 'm', 'a', 'g', 'e'};
    CHECK_THROWS_AS(decode_image(junk), FormatError);
    TempDir dir;
    CHECK_THROWS_AS(load_image(dir / "missing.png"), ValidationError);
}
