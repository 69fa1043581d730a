#include "memesent/embeddings.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "memesent/binary_io.hpp"
#include "memesent/errors.hpp"

namespace memesent {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::string clean_token(std::string_view raw, const EmbeddingLoadOptions& opts, std::size_t index) {
    if (is_valid_utf8(raw)) return std::string(raw);
    if (opts.utf8 == Utf8Policy::Replace) return replace_invalid_utf8(raw);
    throw FormatError("word " + std::to_string(index) + ": token is not valid UTF-8");
}

struct Header {
    std::size_t vocab = 0;
    std::size_t dim = 0;
    std::size_t consumed = 0;
};

Header parse_header(std::string_view text) {
    const auto nl = text.find('\n');
    if (nl == std::string_view::npos) throw FormatError("missing header line");
    const std::string_view line = text.substr(0, nl);
    Header h;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto skip = [&] {
        while (p < end && is_space(*p)) ++p;
    };
    skip();
    auto r1 = std::from_chars(p, end, h.vocab);
    if (r1.ec != std::errc{}) throw FormatError("header: bad vocabulary size");
    p = r1.ptr;
    skip();
    auto r2 = std::from_chars(p, end, h.dim);
    if (r2.ec != std::errc{}) throw FormatError("header: bad dimension");
    p = r2.ptr;
    skip();
    if (p != end) throw FormatError("header: trailing characters");
    if (h.dim == 0) throw FormatError("header: dimension must be positive");
    h.consumed = nl + 1;
    return h;
}

EmbeddingTable finish(std::vector<std::string> words, std::vector<double> values, std::size_t dim) {
    EmbeddingTable::RowMatrix m(static_cast<Eigen::Index>(words.size()), static_cast<Eigen::Index>(dim));
    if (!values.empty()) std::memcpy(m.data(), values.data(), values.size() * sizeof(double));
    try {
        return EmbeddingTable(std::move(words), std::move(m));
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::vector<std::string> words, RowMatrix vectors)
    : words_(std::move(words)), vectors_(std::move(vectors)) {
    if (static_cast<std::size_t>(vectors_.rows()) != words_.size()) {
        throw std::invalid_argument("embedding table: word count and vector count differ");
    }
    if (!vectors_.allFinite()) throw std::invalid_argument("embedding table: non-finite component");
    index_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (!index_.emplace(words_[i], i).second) {
            throw std::invalid_argument("embedding table: duplicate word '" + words_[i] + "'");
        }
    }
}

std::optional<std::size_t> EmbeddingTable::find(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool is_valid_utf8(std::string_view s) noexcept {
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > s.size()) return false;
        for (std::size_t k = 1; k < len; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // Overlong forms, surrogates, out of range.
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
            (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
            return false;
        }
        i += len;
    }
    return true;
}

std::string replace_invalid_utf8(std::string_view s) {
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
        // Longest valid prefix of at most 4 bytes starting at i.
        std::size_t len = 0;
        for (std::size_t n = 1; n <= 4 && i + n <= s.size(); ++n) {
            if (is_valid_utf8(s.substr(i, n))) {
                len = n;
                break;
            }
        }
        if (len == 0) {
            out += "\xEF\xBF\xBD";
            ++i;
        } else {
            out.append(s.substr(i, len));
            i += len;
        }
    }
    return out;
}

EmbeddingTable parse_word2vec_binary(std::span<const std::uint8_t> bytes, const EmbeddingLoadOptions& opts) {
    const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    const Header h = parse_header(text.substr(0, std::min<std::size_t>(text.size(), 256)));

    std::vector<std::string> words;
    std::vector<double> values;
    if (!opts.vocabulary) {
        words.reserve(h.vocab);
        values.reserve(h.vocab * h.dim);
    }
    std::size_t pos = h.consumed;
    const std::size_t vec_bytes = h.dim * 4;
    for (std::size_t w = 0; w < h.vocab; ++w) {
        while (pos < text.size() && (text[pos] == '\n' || text[pos] == '\r')) ++pos;
        const auto space = text.find(' ', pos);
        if (space == std::string_view::npos) {
            throw FormatError("truncated file: word " + std::to_string(w) + " of " +
                              std::to_string(h.vocab) + " has no token terminator");
        }
        const std::string_view raw = text.substr(pos, space - pos);
        if (raw.empty()) throw FormatError("word " + std::to_string(w) + ": empty token");
        pos = space + 1;
        if (text.size() - pos < vec_bytes) {
            throw FormatError("truncated file: vector of word " + std::to_string(w) + " ('" +
                              replace_invalid_utf8(raw) + "') is incomplete");
        }
        std::string token = clean_token(raw, opts, w);
        const bool keep = !opts.vocabulary || opts.vocabulary->contains(token);
        for (std::size_t k = 0; k < h.dim; ++k, pos += 4) {
            std::uint32_t u = 0;
            for (int b = 0; b < 4; ++b) u |= std::uint32_t{bytes[pos + b]} << (8 * b);
            const double v = std::bit_cast<float>(u);
            if (!std::isfinite(v)) {
                throw FormatError("word " + std::to_string(w) + ": non-finite component " + std::to_string(k));
            }
            if (keep) values.push_back(v);
        }
        if (keep) words.push_back(std::move(token));
    }
    for (; pos < text.size(); ++pos) {
        if (!is_space(text[pos])) {
            throw FormatError("header declares " + std::to_string(h.vocab) +
                              " words but the file contains more data");
        }
    }
    EmbeddingTable table = finish(std::move(words), std::move(values), h.dim);
    table.format = EmbeddingFormat::Binary;
    return table;
}

EmbeddingTable load_word2vec_binary(const std::filesystem::path& path, const EmbeddingLoadOptions& opts) {
    auto table = parse_word2vec_binary(read_file_bytes(path), opts);
    table.source = path.string();
    return table;
}

std::vector<std::uint8_t> format_word2vec_binary(const EmbeddingTable& table) {
    const std::string header = std::to_string(table.size()) + " " + std::to_string(table.dim()) + "\n";
    ByteWriter w;
    w.raw({reinterpret_cast<const std::uint8_t*>(header.data()), header.size()});
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& word = table.words()[i];
        w.raw({reinterpret_cast<const std::uint8_t*>(word.data()), word.size()});
        w.u8(' ');
        for (const double v : table.row(i)) w.f32(static_cast<float>(v));
        w.u8('\n');
    }
    return w.take();
}

void write_word2vec_binary(const EmbeddingTable& table, const std::filesystem::path& path) {
    write_file_bytes(path, format_word2vec_binary(table));
}

EmbeddingTable parse_word2vec_text(std::string_view text, const EmbeddingLoadOptions& opts) {
    const Header h = parse_header(text);
    std::vector<std::string> words;
    std::vector<double> values;
    std::size_t pos = h.consumed;
    std::size_t line_no = 1;
    std::size_t word_no = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
        if (word_no == h.vocab) {
            throw FormatError("line " + std::to_string(line_no) + ": header declares " +
                              std::to_string(h.vocab) + " words but the file contains more");
        }

        const auto tok_end = line.find(' ');
        const std::string_view raw = line.substr(0, tok_end);
        std::string token = clean_token(raw, opts, word_no);
        const bool keep = !opts.vocabulary || opts.vocabulary->contains(token);

        const char* p = tok_end == std::string_view::npos ? line.data() + line.size() : line.data() + tok_end;
        const char* end = line.data() + line.size();
        std::size_t count = 0;
        for (;;) {
            while (p < end && (*p == ' ' || *p == '\t')) ++p;
            if (p == end) break;
            float v = 0;
            auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc{}) {
                throw FormatError("line " + std::to_string(line_no) + ": malformed number");
            }
            if (!std::isfinite(v)) throw FormatError("line " + std::to_string(line_no) + ": non-finite value");
            if (keep && count < h.dim) values.push_back(v);
            ++count;
            p = next;
        }
        if (count != h.dim) {
            throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(h.dim) +
                              " components, found " + std::to_string(count));
        }
        if (keep) words.push_back(std::move(token));
        ++word_no;
    }
    if (word_no != h.vocab) {
        throw FormatError("header declares " + std::to_string(h.vocab) + " words but the file contains " +
                          std::to_string(word_no));
    }
    EmbeddingTable table = finish(std::move(words), std::move(values), h.dim);
    table.format = EmbeddingFormat::Text;
    return table;
}

EmbeddingTable load_word2vec_text(const std::filesystem::path& path, const EmbeddingLoadOptions& opts) {
    auto table = parse_word2vec_text(read_text_file(path), opts);
    table.source = path.string();
    return table;
}

std::string format_word2vec_text(const EmbeddingTable& table) {
    std::string out = std::to_string(table.size()) + " " + std::to_string(table.dim()) + "\n";
    char buf[64];
    for (std::size_t i = 0; i < table.size(); ++i) {
        out += table.words()[i];
        for (const double v : table.row(i)) {
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, static_cast<float>(v));
            out.push_back(' ');
            out.append(buf, end);
        }
        out.push_back('\n');
    }
    return out;
}

void write_word2vec_text(const EmbeddingTable& table, const std::filesystem::path& path) {
    write_text_file(path, format_word2vec_text(table));
}

EmbeddingTable load_embeddings(const std::filesystem::path& path, EmbeddingFormat format,
                               const EmbeddingLoadOptions& opts) {
    if (!std::filesystem::exists(path)) throw ValidationError("embedding file not found: " + path.string());
    return format == EmbeddingFormat::Binary ? load_word2vec_binary(path, opts) : load_word2vec_text(path, opts);
}

EmbeddingFormat parse_embedding_format(std::string_view name) {
    if (name == "binary" || name == "bin") return EmbeddingFormat::Binary;
    if (name == "text" || name == "txt") return EmbeddingFormat::Text;
    throw ValidationError("unknown embedding format '" + std::string(name) + "' (expected binary|text)");
}

CaptionEmbedding caption_embedding(const TokenList& tokens, const EmbeddingTable& table) {
    CaptionEmbedding out;
    out.vector = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(table.dim()));
    out.total = tokens.size();
    for (const auto& t : tokens) {
        if (auto idx = table.find(t)) {
            out.vector += table.row(*idx).transpose();
            ++out.covered;
        }
    }
    if (out.covered > 0) out.vector /= static_cast<double>(out.covered);
    return out;
}

CorpusEmbedding embed_corpus(std::span<const TokenList> captions, const EmbeddingTable& table) {
    CorpusEmbedding out;
    out.features.resize(static_cast<Eigen::Index>(captions.size()), static_cast<Eigen::Index>(table.dim()));
    for (std::size_t i = 0; i < captions.size(); ++i) {
        const auto e = caption_embedding(captions[i], table);
        out.features.row(static_cast<Eigen::Index>(i)) = e.vector.transpose();
        out.tokens += e.total;
        out.covered_tokens += e.covered;
        if (e.covered == 0) ++out.all_oov_captions;
    }
    return out;
}

}  // namespace memesent
