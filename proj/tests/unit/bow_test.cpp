#include <doctest.h>

#include "memesent/binary_io.hpp"
#include "memesent/bow.hpp"

using namespace memesent;

TEST_CASE("frequency order with lexicographic ties") {
    const std::vector<TokenList> corpus = {{"b", "a", "c"}, {"c", "b"}, {"d", "c", "a", "e"}};
    const auto v = build_bow_vocab(corpus);
    CHECK(v.tokens() == std::vector<std::string>{"c", "a", "b", "d", "e"});
    const auto top2 = build_bow_vocab(corpus, 2);
    CHECK(top2.tokens() == std::vector<std::string>{"c", "a"});
    CHECK(build_bow_vocab({}, 10).size() == 0);
}

TEST_CASE("presence vectors") {
    const BowVocab v({"x", "y", "z"});
    CHECK(bow_vectorize({"z", "z", "q"}, v) == Eigen::Vector3d(0, 0, 1));
    CHECK(bow_vectorize({}, v) == Eigen::Vector3d::Zero());
    const std::vector<TokenList> docs = {{"x"}, {"y", "x"}};
    const auto m = bow_matrix(docs, v);
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 3);
    CHECK(m.row(1).sum() == 2.0);
}

TEST_CASE("vocabulary invariants and persistence") {
    CHECK_THROWS_AS(BowVocab({"a", "a"}), std::invalid_argument);
    const BowVocab v({"alpha", "beta"});
    CHECK(v.find("beta") == 1u);
    CHECK_FALSE(v.find("gamma"));
    ByteWriter w;
    v.save(w);
    const auto bytes = w.take();
    ByteReader r(bytes);
    CHECK(BowVocab::load(r) == v);
}
