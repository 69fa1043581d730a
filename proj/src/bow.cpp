#include "memesent/bow.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace memesent {

BowVocab::BowVocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (!index_.emplace(tokens_[i], i).second) {
            throw std::invalid_argument("bag-of-words vocabulary has duplicate token '" + tokens_[i] + "'");
        }
    }
}

std::optional<std::size_t> BowVocab::find(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void BowVocab::save(ByteWriter& out) const {
    out.u64(tokens_.size());
    for (const auto& t : tokens_) out.str(t);
}

BowVocab BowVocab::load(ByteReader& in) {
    const auto n = in.u64();
    if (n > in.remaining()) throw FormatError("bag-of-words vocabulary size exceeds payload");
    std::vector<std::string> tokens;
    tokens.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) tokens.push_back(in.str());
    return BowVocab(std::move(tokens));
}

BowVocab build_bow_vocab(std::span<const TokenList> training_corpus, std::size_t max_size) {
    std::map<std::string, std::size_t> freq;
    for (const auto& doc : training_corpus) {
        for (const auto& t : doc) ++freq[t];
    }
    std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > max_size) ranked.resize(max_size);
    std::vector<std::string> tokens;
    tokens.reserve(ranked.size());
    for (auto& [t, _] : ranked) tokens.push_back(std::move(t));
    return BowVocab(std::move(tokens));
}

Eigen::VectorXd bow_vectorize(const TokenList& tokens, const BowVocab& vocab) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vocab.size()));
    for (const auto& t : tokens) {
        if (auto i = vocab.find(t)) v(static_cast<Eigen::Index>(*i)) = 1.0;
    }
    return v;
}

Eigen::MatrixXd bow_matrix(std::span<const TokenList> corpus, const BowVocab& vocab) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(corpus.size()),
                                              static_cast<Eigen::Index>(vocab.size()));
    for (std::size_t r = 0; r < corpus.size(); ++r) {
        for (const auto& t : corpus[r]) {
            if (auto i = vocab.find(t)) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(*i)) = 1.0;
        }
    }
    return m;
}

}  // namespace memesent
