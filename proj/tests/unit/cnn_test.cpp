#include <doctest.h>

#include "memesent/binary_io.hpp"
#include "memesent/cnn.hpp"
#include "synthetic.hpp"

using namespace memesent;

namespace {

struct Images {
    std::vector<HsvTensor> x;
    std::vector<Sentiment> y;
};

Images colour_set(std::size_t n, std::uint64_t seed) {
    Images s;
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = sentiment_from_index(i % 3);
        s.x.push_back(memesent::testing::class_colour_tensor(c, seed * 1000 + i));
        s.y.push_back(c);
    }
    return s;
}

std::vector<std::uint8_t> bytes_of(const CnnModel& m) {
    ByteWriter w;
    m.save(w);
    return w.take();
}

}  // namespace

TEST_CASE("parameter shapes") {
    const auto p = cnn_init(1);
    CHECK(p.conv1_weight.rows() == 8);
    CHECK(p.conv1_weight.cols() == 27);
    CHECK(p.conv2_weight.rows() == 16);
    CHECK(p.conv2_weight.cols() == 72);
    CHECK(p.head.input_dim() == 1024);
    CHECK(p.head.output_dim() == 3);
    CHECK(p.conv1_bias.isZero());
    CHECK(p == cnn_init(1));
    CHECK_FALSE(p == cnn_init(2));
}

TEST_CASE("gradient check covers the conv layers") {
    auto p = cnn_init(3);
    // Nonzero biases move pre-activations away from the ReLU kink.
    p.conv1_bias.setConstant(0.05);
    p.conv2_bias.setConstant(0.05);
    const auto s = colour_set(3, 3);
    const std::vector<int> y = {0, 1, 2};
    const auto r = cnn_grad_check(p, s.x, y, 1e-5, 24, 3);
    CHECK(r.checked >= 24 * 2);
    CHECK(r.max_relative_error < 1e-4);
}

TEST_CASE("loss and gradients are deterministic") {
    const auto p = cnn_init(5);
    const auto s = colour_set(3, 5);
    const std::vector<int> y = {0, 1, 2};
    const auto lg = cnn_loss_and_gradients(p, s.x, y);
    CHECK(lg.loss > 0.0);
    CHECK(cnn_logits(p, s.x).rows() == 3);
    const auto lg2 = cnn_loss_and_gradients(p, s.x, y);
    CHECK(lg2.grads == lg.grads);
}

TEST_CASE("training separates hue-coded classes") {
    const auto train = colour_set(60, 1);
    nn::TrainConfig cfg;
    cfg.batch_size = 10;
    cfg.epochs = 8;
    cfg.lr = 3e-3;
    cfg.seed = 1;
    CnnTrainInfo info;
    const auto m = cnn_train(train.x, train.y, cfg, 1, &info);
    CHECK(info.epoch_losses.size() == 8);
    const auto probs = cnn_predict(m, train.x);
    std::size_t ok = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        CHECK(probs[i].p[0] + probs[i].p[1] + probs[i].p[2] == doctest::Approx(1.0));
        ok += probs[i].argmax() == train.y[i];
    }
    const double acc = static_cast<double>(ok) / static_cast<double>(probs.size());
    MESSAGE("training accuracy " << acc);
    CHECK(acc >= 0.95);

    const auto again = cnn_train(train.x, train.y, cfg, 1);
    CHECK(bytes_of(again) == bytes_of(m));

    const auto bytes = bytes_of(m);
    ByteReader r(bytes);
    const auto back = CnnModel::load(r);
    CHECK(back.params == m.params);
    CHECK(cnn_predict(back, train.x) == probs);
}

TEST_CASE("shape validation") {
    const auto p = cnn_init(1);
    std::vector<HsvTensor> bad = {HsvTensor{16, 16, std::vector<float>(16 * 16 * 3, 0.1f)}};
    CHECK_THROWS(cnn_logits(p, bad));
}
