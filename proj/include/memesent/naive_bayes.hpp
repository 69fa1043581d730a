#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "memesent/binary_io.hpp"
#include "memesent/corpus.hpp"
#include "memesent/prob.hpp"
#include "memesent/textprep.hpp"

namespace memesent {

/// Multinomial Naive Bayes over token counts with additive smoothing:
///   P(c)   = docs_c / docs
///   P(w|c) = (count(w, c) + alpha) / (tokens_c + alpha * |V|)
/// Tokens outside the training vocabulary are ignored at prediction time.
class NbModel {
public:
    std::vector<std::string> vocabulary;                  // sorted
    std::array<double, kNumClasses> log_prior{};          // -inf for classes without documents
    std::vector<std::array<double, kNumClasses>> log_likelihood;  // parallel to vocabulary
    double alpha = 1.0;

    std::optional<std::size_t> index_of_token(const std::string& token) const;
    void rebuild_index();

    void save(ByteWriter& out) const;
    static NbModel load(ByteReader& in);

private:
    std::unordered_map<std::string, std::size_t> index_;
};

NbModel nb_train(std::span<const TokenList> corpus, std::span<const Sentiment> labels, double alpha = 1.0);

/// Posterior by log-sum-exp normalisation; an empty token list yields the prior.
ProbDist3 nb_predict(const NbModel& model, const TokenList& tokens);

}  // namespace memesent
