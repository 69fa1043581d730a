#include "memesent/binary_io.hpp"

#include <zlib.h>

#include "memesent/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace memesent {

namespace {

constexpr std::string_view kMagic = "MEMESENT";

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
    }
}

}  // namespace

void ByteWriter::u32(std::uint32_t v) { put_le(bytes_, v); }
void ByteWriter::u64(std::uint64_t v) { put_le(bytes_, v); }
void ByteWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::str(std::string_view s) {
    u64(s.size());
    bytes_.insert(bytes_.end(), s.begin(), s.end());
}

void ByteWriter::raw(std::span<const std::uint8_t> data) {
    bytes_.insert(bytes_.end(), data.begin(), data.end());
}

void ByteReader::need(std::size_t n) const {
    if (remaining() < n) {
        throw FormatError("unexpected end of data at byte " + std::to_string(pos_) +
                          " (need " + std::to_string(n) + ", have " +
                          std::to_string(remaining()) + ")");
    }
}

std::uint8_t ByteReader::u8() {
    need(1);
    return data_[pos_++];
}

std::uint32_t ByteReader::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{data_[pos_++]} << (8 * i);
    return v;
}

std::uint64_t ByteReader::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{data_[pos_++]} << (8 * i);
    return v;
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }
double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::string ByteReader::str() {
    const std::uint64_t n = u64();
    need(n);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
}

void ByteReader::expect_end() const {
    if (remaining() != 0) {
        throw FormatError(std::to_string(remaining()) + " trailing bytes after payload");
    }
}

std::uint32_t crc32(std::span<const std::uint8_t> data) noexcept {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in chunks for very large payloads.
    std::size_t offset = 0;
    while (offset < data.size()) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - offset, 1u << 30));
        crc = ::crc32(crc, data.data() + offset, chunk);
        offset += chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> encode_blob(const ModelBlob& blob) {
    ByteWriter w;
    w.raw({reinterpret_cast<const std::uint8_t*>(kMagic.data()), kMagic.size()});
    w.u32(blob.version);
    w.str(blob.kind);
    w.u64(blob.payload.size());
    w.raw(blob.payload);
    const std::uint32_t checksum = crc32(w.bytes());
    w.u32(checksum);
    return w.take();
}

ModelBlob decode_blob(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kMagic.size() + 4 ||
        std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
        throw FormatError("not a memesent model file (bad magic)");
    }
    if (bytes.size() < 4) throw FormatError("model file too short");
    const auto body = bytes.first(bytes.size() - 4);
    ByteReader tail(bytes.last(4));
    const std::uint32_t stored = tail.u32();
    if (crc32(body) != stored) throw FormatError("model file checksum mismatch");

    ByteReader r(body);
    r.u64();  // magic, already checked
    ModelBlob blob;
    blob.version = r.u32();
    blob.kind = r.str();
    const std::uint64_t n = r.u64();
    if (n != r.remaining()) throw FormatError("model payload length mismatch");
    blob.payload.assign(body.begin() + static_cast<std::ptrdiff_t>(r.position()), body.end());
    return blob;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    if (!std::filesystem::is_regular_file(path)) throw ValidationError("file not found: " + path.string());
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    if (!std::filesystem::is_regular_file(path)) throw ValidationError("file not found: " + path.string());
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace memesent
