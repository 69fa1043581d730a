#include <doctest.h>

#include "memesent/binary_io.hpp"
#include "memesent/fusion.hpp"
#include "synthetic.hpp"

using namespace memesent;

namespace {

ProbDist3 onehot(Sentiment s) {
    ProbDist3 d;
    d.p[index_of(s)] = 1.0;
    return d;
}

const ProbDist3 kUniform{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};

std::vector<Sentiment> cycle_labels(std::size_t n, std::uint64_t seed) {
    auto rng = CounterRng::stream(seed, "fusion_labels");
    std::vector<Sentiment> y;
    for (std::size_t i = 0; i < n; ++i) y.push_back(sentiment_from_index(rng.uniform_index(3)));
    return y;
}

/// Noisy but correct text distributions: the gold class keeps most mass.
std::vector<ProbDist3> soft_text(const std::vector<Sentiment>& y, std::uint64_t seed) {
    auto rng = CounterRng::stream(seed, "soft");
    std::vector<ProbDist3> out;
    for (const auto s : y) {
        ProbDist3 d;
        double rest = 0.4 * rng.uniform01();
        const double a = rest * rng.uniform01();
        d.p = {a, rest - a, 0.0};
        std::swap(d.p[2], d.p[index_of(s)]);
        d.p[index_of(s)] = 1.0 - rest;
        out.push_back(d);
    }
    return out;
}

}  // namespace

TEST_CASE("feature layout is text then image, six columns") {
    const std::vector<ProbDist3> t = {ProbDist3{{0.1, 0.2, 0.7}}};
    const std::vector<ProbDist3> i = {ProbDist3{{0.5, 0.25, 0.25}}};
    const auto f = fusion_features(t, i);
    CHECK(f.cols() == 6);
    CHECK(kFusionFeatures == 6);
    CHECK(f(0, 2) == 0.7);
    CHECK(f(0, 3) == 0.5);
    CHECK_THROWS_AS(fusion_features(t, std::span<const ProbDist3>{}), ValidationError);
}

TEST_CASE("perfect text branch and uniform image branch") {
    const auto ytrain = cycle_labels(200, 1);
    const auto yval = cycle_labels(100, 2);
    const auto ttrain = soft_text(ytrain, 1);
    const std::vector<ProbDist3> itrain(ytrain.size(), kUniform);
    StackerConfig cfg;
    cfg.seed = 1;
    const auto st = fusion_train(ttrain, itrain, ytrain, cfg);
    CHECK(st.weight.allFinite());
    const auto tval = soft_text(yval, 2);
    std::size_t ok = 0;
    for (std::size_t i = 0; i < yval.size(); ++i) ok += fusion_predict(st, tval[i], kUniform) == yval[i];
    CHECK(ok == yval.size());
}

TEST_CASE("no information falls back to the majority class") {
    std::vector<Sentiment> y(60, Sentiment::Positive);
    y.insert(y.end(), 25, Sentiment::Neutral);
    y.insert(y.end(), 15, Sentiment::Negative);
    const std::vector<ProbDist3> u(y.size(), kUniform);
    const auto st = fusion_train(u, u, y);
    CHECK(fusion_predict(st, kUniform, kUniform) == Sentiment::Positive);
}

TEST_CASE("hand-set weights") {
    FusionStacker st;
    st.weight.setZero();
    st.weight(0, 3) = 2.0;   // negative reads the image negative column
    st.weight(1, 1) = 1.0;   // neutral reads the text neutral column
    st.weight(2, 2) = 1.0;
    st.bias << 0.0, 0.1, 0.0;
    const ProbDist3 text{{0.2, 0.5, 0.3}};
    const ProbDist3 image{{0.4, 0.3, 0.3}};
    // scores: neg 0.8, neu 0.6, pos 0.3
    const auto sc = fusion_scores(st, text, image);
    CHECK(sc(0) == doctest::Approx(0.8));
    CHECK(sc(1) == doctest::Approx(0.6));
    CHECK(fusion_predict(st, text, image) == Sentiment::Negative);

    FusionStacker id;
    id.weight.leftCols<3>().setIdentity();
    for (const auto s : kAllSentiments) CHECK(fusion_predict(id, onehot(s), kUniform) == s);
    CHECK(fusion_predict(FusionStacker{}, kUniform, kUniform) == Sentiment::Negative);
}

TEST_CASE("stacker training is deterministic and persists") {
    const auto y = cycle_labels(50, 3);
    const auto t = soft_text(y, 3);
    const std::vector<ProbDist3> u(y.size(), kUniform);
    const auto a = fusion_train(t, u, y);
    CHECK(a == fusion_train(t, u, y));
    ByteWriter w;
    a.save(w);
    const auto bytes = w.take();
    ByteReader r(bytes);
    CHECK(FusionStacker::load(r) == a);
    CHECK_THROWS_AS(fusion_train(t, u, std::span<const Sentiment>(y).first(10)), ValidationError);
}

TEST_CASE("swapping branches swaps the learned weight blocks") {
    const auto y = cycle_labels(80, 4);
    const auto t = soft_text(y, 4);
    const auto img = soft_text(y, 5);
    const auto a = fusion_train(t, img, y);
    const auto b = fusion_train(img, t, y);
    CHECK((a.weight.leftCols<3>() - b.weight.rightCols<3>()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((a.weight.rightCols<3>() - b.weight.leftCols<3>()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((a.bias - b.bias).cwiseAbs().maxCoeff() < 1e-12);
    const auto same = fusion_train(t, t, y);
    CHECK((same.weight.leftCols<3>() - same.weight.rightCols<3>()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("bimodal pipeline on keyword captions and coloured images") {
    const auto ds = memesent::testing::keyword_corpus(60, 7);
    std::vector<HsvTensor> images;
    for (std::size_t i = 0; i < ds.size(); ++i) images.push_back(memesent::testing::class_colour_tensor(*ds[i].label, i));
    BimodalConfig cfg;
    cfg.text_spec.hidden = {16};
    cfg.text_spec.init_mode = nn::InitMode::FanIn;
    cfg.text_train.batch_size = 10;
    cfg.text_train.epochs = 5;
    cfg.image_train.batch_size = 10;
    cfg.image_train.epochs = 2;
    cfg.folds = 3;
    cfg.stacker.epochs = 50;
    const auto caps = ds.captions();
    const auto labels = ds.labels();
    const auto m = bimodal_train(caps, images, labels, cfg);
    const auto preds = bimodal_predict(m, caps, images);
    REQUIRE(preds.size() == ds.size());
    for (const auto& p : preds) {
        CHECK(p.text.p[0] + p.text.p[1] + p.text.p[2] == doctest::Approx(1.0));
        CHECK(p.image.p[0] + p.image.p[1] + p.image.p[2] == doctest::Approx(1.0));
    }
    ByteWriter w;
    m.save(w);
    const auto bytes = w.take();
    ByteReader r(bytes);
    const auto back = BimodalModel::load(r);
    const auto again = bimodal_predict(back, caps, images);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        CHECK(again[i].label == preds[i].label);
        CHECK(again[i].text == preds[i].text);
    }
    CHECK_THROWS_AS(bimodal_train(caps, std::span<const HsvTensor>(images).first(5), labels, cfg), ValidationError);
}
