#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "memesent/binary_io.hpp"
#include "memesent/textprep.hpp"

namespace memesent {

/// Fixed bag-of-words vocabulary: the most frequent training tokens, most
/// frequent first, ties broken lexicographically.
class BowVocab {
public:
    BowVocab() = default;
    explicit BowVocab(std::vector<std::string> tokens);

    const std::vector<std::string>& tokens() const noexcept { return tokens_; }
    std::size_t size() const noexcept { return tokens_.size(); }
    std::optional<std::size_t> find(const std::string& token) const;

    void save(ByteWriter& out) const;
    static BowVocab load(ByteReader& in);

    friend bool operator==(const BowVocab& a, const BowVocab& b) { return a.tokens_ == b.tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr std::size_t kDefaultBowSize = 5000;

BowVocab build_bow_vocab(std::span<const TokenList> training_corpus, std::size_t max_size = kDefaultBowSize);

/// Presence indicator: component i is 1 iff vocab[i] occurs in tokens.
Eigen::VectorXd bow_vectorize(const TokenList& tokens, const BowVocab& vocab);
Eigen::MatrixXd bow_matrix(std::span<const TokenList> corpus, const BowVocab& vocab);

}  // namespace memesent
