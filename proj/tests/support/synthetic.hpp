#pragma once

// Fixtures shared by the unit, CLI and acceptance suites.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "memesent/corpus.hpp"
#include "memesent/embeddings.hpp"
#include "memesent/hsv.hpp"

namespace memesent::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& prefix = "memesent");
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Three disjoint keyword vocabularies (three words per class) plus one
/// shared filler word: ten words in total.
const std::vector<std::string>& class_keywords(Sentiment s);
const std::string& filler_word();

/// n captions cycling through the classes; each caption mixes 2-5 class
/// keywords with stopwords, punctuation and sometimes the filler word.
Dataset keyword_corpus(std::size_t n, std::uint64_t seed);

/// Random N(0,1) vectors (seeded) for the ten corpus words.
EmbeddingTable toy_embedding_table(std::size_t dim, std::uint64_t seed);

/// Solid-colour 32x32 tensor whose hue band encodes the class
/// (negative ~ red, neutral ~ green, positive ~ blue) with per-image jitter.
HsvTensor class_colour_tensor(Sentiment s, std::uint64_t seed);
RgbImage class_colour_image(Sentiment s, std::uint64_t seed, std::size_t side = 48);

}  // namespace memesent::testing
