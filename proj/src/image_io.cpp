#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>

// jpeglib.h needs FILE and size_t declared first.
#include <jpeglib.h>

#include "memesent/binary_io.hpp"
#include "memesent/errors.hpp"
#include "memesent/hsv.hpp"

namespace memesent {

namespace {

RgbImage decode_png(std::span<const std::uint8_t> bytes) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
        throw FormatError(std::string("undecodable PNG: ") + img.message);
    }
    img.format = PNG_FORMAT_RGB;
    RgbImage out{img.width, img.height, std::vector<std::uint8_t>(PNG_IMAGE_SIZE(img))};
    if (!png_image_finish_read(&img, nullptr, out.pixels.data(), 0, nullptr)) {
        png_image_free(&img);
        throw FormatError(std::string("undecodable PNG: ") + img.message);
    }
    return out;
}

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

RgbImage decode_jpeg(std::span<const std::uint8_t> bytes) {
    jpeg_decompress_struct cinfo;
    JpegErrorManager jerr;
    cinfo.err = jpeg_std_error(&jerr.base);
    jerr.base.error_exit = jpeg_error_exit;
    // Allocated before setjmp and never reassigned, so it survives a longjmp.
    const auto holder = std::make_unique<RgbImage>();
    RgbImage& out = *holder;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw FormatError(std::string("undecodable JPEG: ") + jerr.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    out.width = cinfo.output_width;
    out.height = cinfo.output_height;
    out.pixels.resize(out.width * out.height * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out.pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * out.width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return std::move(out);
}

}  // namespace

RgbImage decode_image(std::span<const std::uint8_t> bytes) {
    static constexpr std::uint8_t kPng[] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    RgbImage img;
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPng, 8) == 0) {
        img = decode_png(bytes);
    } else if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
        img = decode_jpeg(bytes);
    } else {
        throw FormatError("undecodable image: not a PNG or JPEG stream");
    }
    if (img.width == 0 || img.height == 0) throw FormatError("image has zero dimensions");
    return img;
}

RgbImage load_image(const std::filesystem::path& path) {
    try {
        return decode_image(read_file_bytes(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::vector<std::uint8_t> encode_png(const RgbImage& image) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(image.width);
    img.height = static_cast<png_uint_32>(image.height);
    img.format = PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&img, nullptr, &size, 0, image.pixels.data(), 0, nullptr)) {
        throw std::runtime_error(std::string("PNG encode failed: ") + img.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&img, out.data(), &size, 0, image.pixels.data(), 0, nullptr)) {
        throw std::runtime_error(std::string("PNG encode failed: ") + img.message);
    }
    out.resize(size);
    return out;
}

}  // namespace memesent
