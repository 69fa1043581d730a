#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Core>

#include "memesent/textprep.hpp"

namespace memesent {

enum class EmbeddingFormat { Binary, Text };

enum class Utf8Policy {
    Reject,   ///< invalid token bytes are a FormatError
    Replace,  ///< each invalid byte becomes U+FFFD
};

struct EmbeddingLoadOptions {
    Utf8Policy utf8 = Utf8Policy::Reject;
    /// When set, only these words are kept (the file is still fully validated).
    std::optional<std::unordered_set<std::string>> vocabulary;
};

/// Word -> dense vector map. Vectors are stored in 64-bit precision, one per
/// row, in file order.
class EmbeddingTable {
public:
    using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    EmbeddingTable() = default;
    /// Throws std::invalid_argument on shape mismatch, duplicate words or non-finite values.
    EmbeddingTable(std::vector<std::string> words, RowMatrix vectors);

    std::size_t size() const noexcept { return words_.size(); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(vectors_.cols()); }
    const std::vector<std::string>& words() const noexcept { return words_; }
    const RowMatrix& vectors() const noexcept { return vectors_; }

    std::optional<std::size_t> find(std::string_view word) const;
    bool contains(std::string_view word) const { return find(word).has_value(); }
    auto row(std::size_t i) const { return vectors_.row(static_cast<Eigen::Index>(i)); }

    std::string source;
    std::optional<EmbeddingFormat> format;

private:
    std::vector<std::string> words_;
    RowMatrix vectors_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Classic word2vec binary: "<vocab> <dim>\n", then per word the token bytes,
/// one space, dim little-endian float32 values and an optional newline.
EmbeddingTable parse_word2vec_binary(std::span<const std::uint8_t> bytes,
                                     const EmbeddingLoadOptions& opts = {});
EmbeddingTable load_word2vec_binary(const std::filesystem::path& path,
                                    const EmbeddingLoadOptions& opts = {});
/// Writes one newline after every vector. Values are narrowed to float32.
std::vector<std::uint8_t> format_word2vec_binary(const EmbeddingTable& table);
void write_word2vec_binary(const EmbeddingTable& table, const std::filesystem::path& path);

/// Text layout: same header line, then "<token> v1 ... vdim" per line.
EmbeddingTable parse_word2vec_text(std::string_view text, const EmbeddingLoadOptions& opts = {});
EmbeddingTable load_word2vec_text(const std::filesystem::path& path,
                                  const EmbeddingLoadOptions& opts = {});
/// Shortest decimal form that reproduces each float32 value.
std::string format_word2vec_text(const EmbeddingTable& table);
void write_word2vec_text(const EmbeddingTable& table, const std::filesystem::path& path);

EmbeddingTable load_embeddings(const std::filesystem::path& path, EmbeddingFormat format,
                               const EmbeddingLoadOptions& opts = {});
EmbeddingFormat parse_embedding_format(std::string_view name);

bool is_valid_utf8(std::string_view bytes) noexcept;
std::string replace_invalid_utf8(std::string_view bytes);

struct CaptionEmbedding {
    Eigen::VectorXd vector;
    std::size_t covered = 0;  ///< in-vocabulary tokens
    std::size_t total = 0;    ///< all tokens
};

/// Mean of the in-vocabulary token vectors; OOV tokens are skipped and a
/// caption with no in-vocabulary token maps to the zero vector.
CaptionEmbedding caption_embedding(const TokenList& tokens, const EmbeddingTable& table);

struct CorpusEmbedding {
    Eigen::MatrixXd features;  ///< n x dim, row i = caption i
    std::size_t all_oov_captions = 0;
    std::size_t tokens = 0;
    std::size_t covered_tokens = 0;

    double all_oov_fraction() const noexcept {
        return features.rows() == 0 ? 0.0
                                    : static_cast<double>(all_oov_captions) /
                                          static_cast<double>(features.rows());
    }
};

CorpusEmbedding embed_corpus(std::span<const TokenList> captions, const EmbeddingTable& table);

}  // namespace memesent
