#include <doctest.h>

#include "memesent/rng.hpp"
#include "memesent/textprep.hpp"

using namespace memesent;

TEST_CASE("preprocess examples") {
    const auto cfg = PrepConfig::defaults();
    CHECK(preprocess("I am feeling unhappy.", cfg) == TokenList{"feeling", "unhappy"});
    CHECK(preprocess("", cfg).empty());
    CHECK(preprocess("Dogs, CATS & birds!!!", cfg) == TokenList{"dog", "cat", "bird"});
}

TEST_CASE("non-ascii bytes and punctuation act as separators") {
    const auto cfg = PrepConfig::defaults();
    CHECK(preprocess("caf\xC3\xA9 time", cfg) == TokenList{"caf", "time"});
    CHECK(preprocess("well...whatever@#now", cfg) == TokenList{"well", "whatever"});
    CHECK(preprocess("!!! ??? ...", cfg).empty());
}

TEST_CASE("digit handling is configurable") {
    auto cfg = PrepConfig::defaults();
    CHECK(preprocess("top 10 memes", cfg) == TokenList{"top", "10", "meme"});
    cfg.strip_digits = true;
    CHECK(preprocess("top 10 memes", cfg) == TokenList{"top", "meme"});
}

TEST_CASE("stage toggles") {
    auto cfg = PrepConfig::defaults();
    cfg.remove_stopwords = false;
    CHECK(preprocess("I am cats", cfg) == TokenList{"i", "am", "cat"});
    cfg.lemmatize = false;
    CHECK(preprocess("I am cats", cfg) == TokenList{"i", "am", "cats"});
    cfg.remove_stopwords = true;
    cfg.stopwords.clear();
    CHECK_THROWS_AS(preprocess("x", cfg), std::invalid_argument);
}

TEST_CASE("lemmatize examples") {
    CHECK(lemmatize("cats") == "cat");
    CHECK(lemmatize("bus") == "bus");
    CHECK(lemmatize("memes") == "meme");
    CHECK(lemmatize("parties") == "party");
    CHECK(lemmatize("boxes") == "box");
    CHECK(lemmatize("glass") == "glass");
    CHECK(lemmatize("status") == "status");
    CHECK(lemmatize("analysis") == "analysis");
    CHECK(lemmatize("children") == "child");
    CHECK(lemmatize("news") == "news");
    CHECK(lemmatize("its") == "its");
    CHECK(lemmatize("feeling") == "feeling");
}

TEST_CASE("verb rules are opt-in") {
    Lemmatizer lem;
    CHECK(lem.lemmatize("jumping") == "jumping");
    lem.verb_rules = true;
    CHECK(lem.lemmatize("jumping") == "jump");
    CHECK(lem.lemmatize("jumped") == "jump");
    CHECK(lem.lemmatize("sing") == "sing");
}

TEST_CASE("custom exception text") {
    const auto lem = Lemmatizer::from_exception_text("# comment\nlens\noxen ox\n");
    CHECK(lem.lemmatize("lens") == "lens");
    CHECK(lem.lemmatize("oxen") == "ox");
    CHECK(lem.lemmatize("cats") == "cat");
    CHECK_THROWS_AS(Lemmatizer::from_exception_text("a b c\n"), std::invalid_argument);
}

TEST_CASE("word list parsing") {
    CHECK(parse_word_list("# head\n  alpha \n\nbeta # tail\n") == std::vector<std::string>{"alpha", "beta"});
    const auto sw = bundled_stopwords();
    CHECK(sw.count("i") == 1);
    CHECK(sw.count("am") == 1);
    CHECK(sw.count("the") == 1);
}

namespace {

std::string random_text(CounterRng& rng) {
    static const std::string alphabet = "abcdefgh ijklmnoprstu SIEXY,.!?'\t\n0123\xC3\xA9";
    std::string s;
    const auto len = rng.uniform_index(40);
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng.uniform_index(alphabet.size())];
    return s;
}

}  // namespace

TEST_CASE("output tokens are clean, lowercase and stopword free") {
    const auto cfg = PrepConfig::defaults();
    auto rng = CounterRng::stream(3, "textprep");
    for (int i = 0; i < 500; ++i) {
        const auto toks = preprocess(random_text(rng), cfg);
        for (const auto& t : toks) {
            REQUIRE_FALSE(t.empty());
            for (const char ch : t) {
                CHECK(((ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9')));
            }
            CHECK(cfg.stopwords.count(t) == 0);
        }
    }
}

TEST_CASE("preprocess is idempotent on its own output") {
    const auto cfg = PrepConfig::defaults();
    auto rng = CounterRng::stream(4, "textprep");
    for (int i = 0; i < 500; ++i) {
        const auto once = preprocess(random_text(rng), cfg);
        CHECK(preprocess(join_tokens(once), cfg) == once);
    }
}

TEST_CASE("lemmatize is idempotent") {
    for (const auto* w : {"cats", "parties", "boxes", "memes", "glasses", "buses", "series", "ies", "sss", "wolves",
                          "knives", "babies", "ss", "s", "gases"}) {
        const auto once = lemmatize(w);
        CHECK(lemmatize(once) == once);
    }
    Lemmatizer verbs;
    verbs.verb_rules = true;
    for (const auto* w : {"singings", "jumpeds", "running", "needed", "seeds"}) {
        const auto once = verbs.lemmatize(w);
        CHECK(verbs.lemmatize(once) == once);
    }
}
