#include "memesent/naive_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace memesent {

std::optional<std::size_t> NbModel::index_of_token(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void NbModel::rebuild_index() {
    index_.clear();
    for (std::size_t i = 0; i < vocabulary.size(); ++i) index_.emplace(vocabulary[i], i);
}

void NbModel::save(ByteWriter& out) const {
    out.f64(alpha);
    for (double lp : log_prior) out.f64(lp);
    out.u64(vocabulary.size());
    for (std::size_t i = 0; i < vocabulary.size(); ++i) {
        out.str(vocabulary[i]);
        for (double ll : log_likelihood[i]) out.f64(ll);
    }
}

NbModel NbModel::load(ByteReader& in) {
    NbModel m;
    m.alpha = in.f64();
    for (double& lp : m.log_prior) lp = in.f64();
    const auto n = in.u64();
    if (n > in.remaining()) throw FormatError("naive bayes: vocabulary size exceeds payload");
    m.vocabulary.reserve(n);
    m.log_likelihood.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        m.vocabulary.push_back(in.str());
        std::array<double, kNumClasses> ll{};
        for (double& v : ll) v = in.f64();
        m.log_likelihood.push_back(ll);
    }
    m.rebuild_index();
    return m;
}

NbModel nb_train(std::span<const TokenList> corpus, std::span<const Sentiment> labels, double alpha) {
    if (!(alpha > 0.0)) throw ValidationError("naive bayes smoothing alpha must be > 0");
    if (corpus.empty()) throw ValidationError("naive bayes: empty training corpus");
    if (corpus.size() != labels.size()) throw ValidationError("naive bayes: corpus and labels differ in length");

    std::map<std::string, std::array<std::size_t, kNumClasses>> counts;
    std::array<std::size_t, kNumClasses> docs{};
    std::array<std::size_t, kNumClasses> tokens{};
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        const auto c = index_of(labels[d]);
        ++docs[c];
        for (const auto& t : corpus[d]) {
            ++counts[t][c];
            ++tokens[c];
        }
    }

    NbModel m;
    m.alpha = alpha;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        m.log_prior[c] = docs[c] == 0 ? -std::numeric_limits<double>::infinity()
                                      : std::log(static_cast<double>(docs[c]) / static_cast<double>(corpus.size()));
    }
    const double v = static_cast<double>(counts.size());
    m.vocabulary.reserve(counts.size());
    m.log_likelihood.reserve(counts.size());
    for (const auto& [word, per_class] : counts) {
        std::array<double, kNumClasses> ll{};
        for (std::size_t c = 0; c < kNumClasses; ++c) {
            ll[c] = std::log((static_cast<double>(per_class[c]) + alpha) /
                             (static_cast<double>(tokens[c]) + alpha * v));
        }
        m.vocabulary.push_back(word);
        m.log_likelihood.push_back(ll);
    }
    m.rebuild_index();
    return m;
}

ProbDist3 nb_predict(const NbModel& model, const TokenList& tokens) {
    std::array<double, kNumClasses> score = model.log_prior;
    for (const auto& t : tokens) {
        if (auto i = model.index_of_token(t)) {
            for (std::size_t c = 0; c < kNumClasses; ++c) score[c] += model.log_likelihood[*i][c];
        }
    }
    const double top = *std::max_element(score.begin(), score.end());
    ProbDist3 out;
    double z = 0.0;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        out.p[c] = std::exp(score[c] - top);
        z += out.p[c];
    }
    for (double& p : out.p) p /= z;
    return out;
}

}  // namespace memesent
