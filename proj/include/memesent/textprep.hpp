#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace memesent {

using TokenList = std::vector<std::string>;

/// Suffix-rule lemmatizer. Plural rules (-s, -es, -ies) always apply; the
/// verb rules (-ing, -ed) are opt-in. A rule fires only if the remaining
/// stem has at least min_stem characters, and rules are applied until the
/// word stops changing, so lemmatize(lemmatize(w)) == lemmatize(w).
class Lemmatizer {
public:
    /// Uses the bundled exception list.
    Lemmatizer();
    /// Exception text format: "<word>" (protected) or "<word> <lemma>" per line.
    static Lemmatizer from_exception_text(std::string_view text);

    std::string lemmatize(std::string_view token) const;

    bool verb_rules = false;
    std::size_t min_stem = 3;

    /// Flattened exception entries, sorted, for persistence.
    std::vector<std::pair<std::string, std::string>> exceptions() const;

private:
    struct Empty {};
    explicit Lemmatizer(Empty) {}
    std::string step(const std::string& word) const;

    std::unordered_map<std::string, std::string> irregular_;
    std::unordered_set<std::string> protected_;
};

struct PrepConfig {
    std::set<std::string> stopwords;
    bool remove_stopwords = true;
    bool lemmatize = true;
    bool verb_lemma_rules = false;
    bool strip_digits = false;

    /// Bundled stopword list, lemmatization on, digits kept.
    static PrepConfig defaults();
};

/// Strip punctuation/special characters (incl. every non-ASCII byte),
/// lowercase, split on whitespace, drop stopwords, lemmatize. Lemmas that
/// land on a stopword are dropped as well.
TokenList preprocess(std::string_view raw, const PrepConfig& cfg, const Lemmatizer& lemmatizer);
TokenList preprocess(std::string_view raw, const PrepConfig& cfg);

/// Lemmatize with the bundled exception list and default rules.
std::string lemmatize(std::string_view token);

/// One entry per line, '#' starts a comment, surrounding whitespace ignored.
std::vector<std::string> parse_word_list(std::string_view text);
std::vector<std::string> load_word_list(const std::filesystem::path& path);

std::set<std::string> bundled_stopwords();
std::string_view bundled_lemma_exceptions();

std::string join_tokens(const TokenList& tokens);

}  // namespace memesent
