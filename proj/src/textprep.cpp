#include "memesent/textprep.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "memesent/binary_io.hpp"

namespace memesent {

namespace bundled {
extern const std::string_view stopwords_text;
extern const std::string_view lemma_exceptions_text;
}  // namespace bundled

namespace {

bool ends_with(const std::string& w, std::string_view suffix) { return w.ends_with(suffix); }

bool is_word_char(unsigned char c, bool strip_digits) {
    if (c >= 'a' && c <= 'z') return true;
    if (c >= 'A' && c <= 'Z') return true;
    if (c >= '0' && c <= '9') return !strip_digits;
    return false;
}

}  // namespace

std::vector<std::string> parse_word_list(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        out.push_back(line.substr(first, last - first + 1));
    }
    return out;
}

std::vector<std::string> load_word_list(const std::filesystem::path& path) {
    return parse_word_list(read_text_file(path));
}

std::set<std::string> bundled_stopwords() {
    const auto words = parse_word_list(bundled::stopwords_text);
    return {words.begin(), words.end()};
}

std::string_view bundled_lemma_exceptions() { return bundled::lemma_exceptions_text; }

Lemmatizer::Lemmatizer() : Lemmatizer(from_exception_text(bundled::lemma_exceptions_text)) {}

Lemmatizer Lemmatizer::from_exception_text(std::string_view text) {
    Lemmatizer lem{Empty{}};
    for (const auto& entry : parse_word_list(text)) {
        std::istringstream fields(entry);
        std::string word, lemma, extra;
        fields >> word >> lemma >> extra;
        if (!extra.empty()) throw std::invalid_argument("malformed lemma exception: '" + entry + "'");
        if (lemma.empty()) {
            lem.protected_.insert(word);
        } else {
            lem.irregular_[word] = lemma;
            lem.protected_.insert(lemma);
        }
    }
    return lem;
}

std::vector<std::pair<std::string, std::string>> Lemmatizer::exceptions() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [w, l] : irregular_) out.emplace_back(w, l);
    for (const auto& w : protected_) {
        if (!irregular_.contains(w)) out.emplace_back(w, std::string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string Lemmatizer::step(const std::string& w) const {
    if (auto it = irregular_.find(w); it != irregular_.end()) return it->second;
    if (protected_.contains(w)) return w;

    auto strip = [&](std::size_t n, std::string_view add = {}) -> std::string {
        if (w.size() < n || w.size() - n < min_stem) return w;
        return w.substr(0, w.size() - n) + std::string(add);
    };

    if (ends_with(w, "ss") || ends_with(w, "us") || ends_with(w, "is")) return w;
    if (ends_with(w, "ies")) {
        if (auto r = strip(3, "y"); r != w) return r;
        return strip(1);
    }
    if (ends_with(w, "sses") || ends_with(w, "xes") || ends_with(w, "ches") || ends_with(w, "shes")) {
        return strip(2);
    }
    if (ends_with(w, "s")) return strip(1);
    if (verb_rules) {
        if (ends_with(w, "ing")) return strip(3);
        if (ends_with(w, "ed")) return strip(2);
    }
    return w;
}

std::string Lemmatizer::lemmatize(std::string_view token) const {
    std::string word(token);
    for (;;) {
        std::string next = step(word);
        if (next == word) return word;
        word = std::move(next);
    }
}

PrepConfig PrepConfig::defaults() {
    PrepConfig cfg;
    cfg.stopwords = bundled_stopwords();
    return cfg;
}

TokenList preprocess(std::string_view raw, const PrepConfig& cfg, const Lemmatizer& lemmatizer) {
    if (cfg.remove_stopwords && cfg.stopwords.empty()) {
        throw std::invalid_argument("stopword removal enabled with an empty stopword set");
    }
    std::string cleaned(raw.size(), ' ');
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto c = static_cast<unsigned char>(raw[i]);
        if (is_word_char(c, cfg.strip_digits)) {
            cleaned[i] = (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
        }
    }

    auto is_stop = [&](const std::string& t) {
        return cfg.remove_stopwords && cfg.stopwords.contains(t);
    };

    TokenList tokens;
    std::istringstream words(cleaned);
    std::string token;
    while (words >> token) {
        if (is_stop(token)) continue;
        if (cfg.lemmatize) {
            token = lemmatizer.lemmatize(token);
            if (is_stop(token)) continue;
        }
        tokens.push_back(std::move(token));
    }
    return tokens;
}

TokenList preprocess(std::string_view raw, const PrepConfig& cfg) {
    static const Lemmatizer plural_only = [] {
        Lemmatizer l;
        l.verb_rules = false;
        return l;
    }();
    static const Lemmatizer with_verbs = [] {
        Lemmatizer l;
        l.verb_rules = true;
        return l;
    }();
    return preprocess(raw, cfg, cfg.verb_lemma_rules ? with_verbs : plural_only);
}

std::string lemmatize(std::string_view token) {
    static const Lemmatizer lemmatizer;
    return lemmatizer.lemmatize(token);
}

std::string join_tokens(const TokenList& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

}  // namespace memesent
