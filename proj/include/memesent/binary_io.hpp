#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace memesent {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Append-only little-endian byte sink.
class ByteWriter {
public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f32(float v);
    void f64(double v);
    void str(std::string_view s);  // u64 length prefix + bytes
    void raw(std::span<const std::uint8_t> data);

    const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }
    std::vector<std::uint8_t> take() noexcept { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
};

/// Bounds-checked little-endian reader over a byte buffer.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) noexcept : data_(data) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    float f32();
    double f64();
    std::string str();

    std::size_t remaining() const noexcept { return data_.size() - pos_; }
    std::size_t position() const noexcept { return pos_; }
    void expect_end() const;

private:
    void need(std::size_t n) const;

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

std::uint32_t crc32(std::span<const std::uint8_t> data) noexcept;

/// Model container: "MEMESENT" magic, u32 format version, kind string,
/// u64 payload length, payload, u32 CRC32 of everything before it.
struct ModelBlob {
    std::string kind;
    std::uint32_t version = 1;
    std::vector<std::uint8_t> payload;
};

std::vector<std::uint8_t> encode_blob(const ModelBlob& blob);
ModelBlob decode_blob(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace memesent
