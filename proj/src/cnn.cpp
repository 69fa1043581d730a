#include "memesent/cnn.hpp"

#include <cmath>

#include "memesent/ffnn_model.hpp"

namespace memesent {

namespace {

constexpr std::size_t kSide1 = kHsvSide;      // 32
constexpr std::size_t kSide2 = kHsvSide / 2;  // 16
constexpr std::size_t kSide3 = kHsvSide / 4;  // 8

nn::NetSpec head_spec(std::uint64_t seed) {
    return nn::NetSpec{.input_dim = CnnParams::kFlat,
                       .hidden = {CnnParams::kHidden},
                       .output_dim = kNumClasses,
                       .activation = nn::Activation::ReLU,
                       .seed = seed,
                       .init_sigma = 1.0,
                       .init_mode = nn::InitMode::FanIn};
}

/// channels x (side*side), from the interleaved HWC tensor.
Eigen::MatrixXd to_planar(const HsvTensor& t) {
    if (t.height != kHsvSide || t.width != kHsvSide || t.values.size() != kHsvSide * kHsvSide * 3) {
        throw nn::ShapeError("cnn input must be a 32x32x3 HSV tensor");
    }
    Eigen::MatrixXd x(3, static_cast<Eigen::Index>(kHsvSide * kHsvSide));
    for (Eigen::Index p = 0; p < x.cols(); ++p) {
        for (Eigen::Index c = 0; c < 3; ++c) x(c, p) = t.values[static_cast<std::size_t>(p * 3 + c)];
    }
    return x;
}

/// 3x3 patches with zero padding; row = channel*9 + ky*3 + kx, column = pixel.
Eigen::MatrixXd im2col(const Eigen::MatrixXd& x, std::size_t side) {
    const auto s = static_cast<Eigen::Index>(side);
    Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(x.rows() * 9, s * s);
    for (Eigen::Index c = 0; c < x.rows(); ++c) {
        for (Eigen::Index ky = 0; ky < 3; ++ky) {
            for (Eigen::Index kx = 0; kx < 3; ++kx) {
                const Eigen::Index row = c * 9 + ky * 3 + kx;
                for (Eigen::Index y = 0; y < s; ++y) {
                    const Eigen::Index sy = y + ky - 1;
                    if (sy < 0 || sy >= s) continue;
                    for (Eigen::Index xx = 0; xx < s; ++xx) {
                        const Eigen::Index sx = xx + kx - 1;
                        if (sx < 0 || sx >= s) continue;
                        cols(row, y * s + xx) = x(c, sy * s + sx);
                    }
                }
            }
        }
    }
    return cols;
}

/// Adjoint of im2col.
Eigen::MatrixXd col2im(const Eigen::MatrixXd& dcols, Eigen::Index channels, std::size_t side) {
    const auto s = static_cast<Eigen::Index>(side);
    Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(channels, s * s);
    for (Eigen::Index c = 0; c < channels; ++c) {
        for (Eigen::Index ky = 0; ky < 3; ++ky) {
            for (Eigen::Index kx = 0; kx < 3; ++kx) {
                const Eigen::Index row = c * 9 + ky * 3 + kx;
                for (Eigen::Index y = 0; y < s; ++y) {
                    const Eigen::Index sy = y + ky - 1;
                    if (sy < 0 || sy >= s) continue;
                    for (Eigen::Index xx = 0; xx < s; ++xx) {
                        const Eigen::Index sx = xx + kx - 1;
                        if (sx < 0 || sx >= s) continue;
                        dx(c, sy * s + sx) += dcols(row, y * s + xx);
                    }
                }
            }
        }
    }
    return dx;
}

struct Pooled {
    Eigen::MatrixXd out;                      // channels x (side/2)^2
    std::vector<Eigen::Index> argmax;         // source pixel per output entry, row-major over (c, q)
};

/// 2x2 stride-2 max pool; ties resolve to the first position in scan order.
Pooled maxpool(const Eigen::MatrixXd& a, std::size_t side) {
    const auto s = static_cast<Eigen::Index>(side);
    const Eigen::Index h = s / 2;
    Pooled p{Eigen::MatrixXd(a.rows(), h * h), std::vector<Eigen::Index>(static_cast<std::size_t>(a.rows() * h * h))};
    for (Eigen::Index c = 0; c < a.rows(); ++c) {
        for (Eigen::Index y = 0; y < h; ++y) {
            for (Eigen::Index x = 0; x < h; ++x) {
                Eigen::Index best = (2 * y) * s + 2 * x;
                for (Eigen::Index dy = 0; dy < 2; ++dy) {
                    for (Eigen::Index dx = 0; dx < 2; ++dx) {
                        const Eigen::Index src = (2 * y + dy) * s + 2 * x + dx;
                        if (a(c, src) > a(c, best)) best = src;
                    }
                }
                p.out(c, y * h + x) = a(c, best);
                p.argmax[static_cast<std::size_t>(c * h * h + y * h + x)] = best;
            }
        }
    }
    return p;
}

Eigen::MatrixXd unpool(const Eigen::MatrixXd& dout, const std::vector<Eigen::Index>& argmax, std::size_t side) {
    const auto s = static_cast<Eigen::Index>(side);
    Eigen::MatrixXd da = Eigen::MatrixXd::Zero(dout.rows(), s * s);
    const Eigen::Index q = dout.cols();
    for (Eigen::Index c = 0; c < dout.rows(); ++c) {
        for (Eigen::Index j = 0; j < q; ++j) da(c, argmax[static_cast<std::size_t>(c * q + j)]) += dout(c, j);
    }
    return da;
}

struct SampleCache {
    Eigen::MatrixXd cols1, pre1, cols2, pre2;
    std::vector<Eigen::Index> argmax1, argmax2;
};

/// Convolutional trunk for one sample; returns the 1024 flattened features
/// (channel-major: index = channel * 64 + pixel).
Eigen::RowVectorXd trunk_forward(const CnnParams& p, const HsvTensor& t, SampleCache* cache) {
    Eigen::MatrixXd cols1 = im2col(to_planar(t), kSide1);
    Eigen::MatrixXd pre1 = p.conv1_weight * cols1;
    pre1.colwise() += p.conv1_bias;
    Pooled pool1 = maxpool(pre1.cwiseMax(0.0), kSide1);

    Eigen::MatrixXd cols2 = im2col(pool1.out, kSide2);
    Eigen::MatrixXd pre2 = p.conv2_weight * cols2;
    pre2.colwise() += p.conv2_bias;
    Pooled pool2 = maxpool(pre2.cwiseMax(0.0), kSide2);

    Eigen::RowVectorXd flat(static_cast<Eigen::Index>(CnnParams::kFlat));
    const Eigen::Index q = static_cast<Eigen::Index>(kSide3 * kSide3);
    for (Eigen::Index c = 0; c < pool2.out.rows(); ++c) flat.segment(c * q, q) = pool2.out.row(c);

    if (cache) {
        *cache = SampleCache{std::move(cols1), std::move(pre1), std::move(cols2), std::move(pre2),
                             std::move(pool1.argmax), std::move(pool2.argmax)};
    }
    return flat;
}

void trunk_backward(const CnnParams& p, const SampleCache& cache, const Eigen::RowVectorXd& dflat, CnnParams& g) {
    const Eigen::Index q = static_cast<Eigen::Index>(kSide3 * kSide3);
    Eigen::MatrixXd dpool2(static_cast<Eigen::Index>(CnnParams::kConv2), q);
    for (Eigen::Index c = 0; c < dpool2.rows(); ++c) dpool2.row(c) = dflat.segment(c * q, q);

    Eigen::MatrixXd dpre2 = unpool(dpool2, cache.argmax2, kSide2);
    dpre2.array() *= (cache.pre2.array() > 0.0).cast<double>();
    g.conv2_weight.noalias() += dpre2 * cache.cols2.transpose();
    g.conv2_bias += dpre2.rowwise().sum();

    const Eigen::MatrixXd dpool1 =
        col2im(p.conv2_weight.transpose() * dpre2, static_cast<Eigen::Index>(CnnParams::kConv1), kSide2);
    Eigen::MatrixXd dpre1 = unpool(dpool1, cache.argmax1, kSide1);
    dpre1.array() *= (cache.pre1.array() > 0.0).cast<double>();
    g.conv1_weight.noalias() += dpre1 * cache.cols1.transpose();
    g.conv1_bias += dpre1.rowwise().sum();
}

Eigen::MatrixXd trunk_batch(const CnnParams& p, std::span<const HsvTensor> batch, std::vector<SampleCache>* caches) {
    Eigen::MatrixXd flat(static_cast<Eigen::Index>(batch.size()), static_cast<Eigen::Index>(CnnParams::kFlat));
    if (caches) caches->resize(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        flat.row(static_cast<Eigen::Index>(i)) = trunk_forward(p, batch[i], caches ? &(*caches)[i] : nullptr);
    }
    return flat;
}

void write_dense(ByteWriter& out, const Eigen::MatrixXd& m) {
    out.u64(static_cast<std::uint64_t>(m.rows()));
    out.u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) out.f64(m.data()[i]);
}

Eigen::MatrixXd read_dense(ByteReader& in, Eigen::Index rows, Eigen::Index cols) {
    if (in.u64() != static_cast<std::uint64_t>(rows) || in.u64() != static_cast<std::uint64_t>(cols)) {
        throw FormatError("cnn: unexpected parameter shape");
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = in.f64();
    return m;
}

}  // namespace

std::vector<std::span<double>> CnnParams::blocks() {
    std::vector<std::span<double>> out{
        {conv1_weight.data(), static_cast<std::size_t>(conv1_weight.size())},
        {conv1_bias.data(), static_cast<std::size_t>(conv1_bias.size())},
        {conv2_weight.data(), static_cast<std::size_t>(conv2_weight.size())},
        {conv2_bias.data(), static_cast<std::size_t>(conv2_bias.size())}};
    for (auto b : head.blocks()) out.push_back(b);
    return out;
}

std::vector<std::span<const double>> CnnParams::blocks() const {
    std::vector<std::span<const double>> out{
        {conv1_weight.data(), static_cast<std::size_t>(conv1_weight.size())},
        {conv1_bias.data(), static_cast<std::size_t>(conv1_bias.size())},
        {conv2_weight.data(), static_cast<std::size_t>(conv2_weight.size())},
        {conv2_bias.data(), static_cast<std::size_t>(conv2_bias.size())}};
    for (auto b : head.blocks()) out.push_back(b);
    return out;
}

CnnParams CnnParams::zeros_like() const {
    return CnnParams{Eigen::MatrixXd::Zero(conv1_weight.rows(), conv1_weight.cols()),
                     Eigen::VectorXd::Zero(conv1_bias.size()),
                     Eigen::MatrixXd::Zero(conv2_weight.rows(), conv2_weight.cols()),
                     Eigen::VectorXd::Zero(conv2_bias.size()), head.zeros_like()};
}

CnnParams cnn_init(std::uint64_t seed) {
    auto rng = CounterRng::stream(seed, "cnn_init");
    auto fill = [&](Eigen::Index rows, Eigen::Index cols) {
        const double sigma = std::sqrt(2.0 / static_cast<double>(cols));
        Eigen::MatrixXd w(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = sigma * rng.normal();
        }
        return w;
    };
    CnnParams p;
    p.conv1_weight = fill(CnnParams::kConv1, 3 * 9);
    p.conv1_bias = Eigen::VectorXd::Zero(CnnParams::kConv1);
    p.conv2_weight = fill(CnnParams::kConv2, CnnParams::kConv1 * 9);
    p.conv2_bias = Eigen::VectorXd::Zero(CnnParams::kConv2);
    p.head = nn::init_params<double>(head_spec(seed));
    return p;
}

Eigen::MatrixXd cnn_logits(const CnnParams& params, std::span<const HsvTensor> batch) {
    return nn::forward(params.head, trunk_batch(params, batch, nullptr)).logits;
}

CnnLossGrad cnn_loss_and_gradients(const CnnParams& params, std::span<const HsvTensor> batch,
                                   std::span<const int> labels) {
    std::vector<SampleCache> caches;
    const Eigen::MatrixXd flat = trunk_batch(params, batch, &caches);
    const auto fwd = nn::forward(params.head, flat);
    const auto loss = nn::softmax_xent(fwd.logits, labels);
    Eigen::MatrixXd dflat;
    CnnLossGrad out{loss.loss, params.zeros_like()};
    out.grads.head = nn::backward(params.head, fwd.cache, loss.dlogits, &dflat);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        trunk_backward(params, caches[i], dflat.row(static_cast<Eigen::Index>(i)), out.grads);
    }
    return out;
}

nn::GradCheckResult cnn_grad_check(const CnnParams& params, std::span<const HsvTensor> batch,
                                   std::span<const int> labels, double eps, std::size_t samples_per_block,
                                   std::uint64_t seed) {
    const auto analytic = cnn_loss_and_gradients(params, batch, labels).grads;
    CnnParams probe = params;
    auto blocks = probe.blocks();
    const auto grad_blocks = analytic.blocks();
    auto loss_at = [&] { return nn::softmax_xent(cnn_logits(probe, batch), labels).loss; };
    auto rng = CounterRng::stream(seed, "gradcheck");
    nn::GradCheckResult r;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        auto block = blocks[k];
        const std::size_t n = std::min(samples_per_block, block.size());
        for (std::size_t s = 0; s < n; ++s) {
            const std::size_t i = block.size() <= samples_per_block ? s : rng.uniform_index(block.size());
            const double saved = block[i];
            block[i] = saved + eps;
            const double plus = loss_at();
            block[i] = saved - eps;
            const double minus = loss_at();
            block[i] = saved;
            const double numeric = (plus - minus) / (2.0 * eps);
            const double a = grad_blocks[k][i];
            r.max_relative_error =
                std::max(r.max_relative_error, std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric)));
            ++r.checked;
        }
    }
    return r;
}

void CnnModel::save(ByteWriter& out) const {
    out.u64(seed);
    write_dense(out, params.conv1_weight);
    write_dense(out, params.conv1_bias);
    write_dense(out, params.conv2_weight);
    write_dense(out, params.conv2_bias);
    save_net(out, head_spec(seed), params.head);
}

CnnModel CnnModel::load(ByteReader& in) {
    CnnModel m;
    m.seed = in.u64();
    m.params.conv1_weight = read_dense(in, CnnParams::kConv1, 3 * 9);
    m.params.conv1_bias = read_dense(in, CnnParams::kConv1, 1);
    m.params.conv2_weight = read_dense(in, CnnParams::kConv2, CnnParams::kConv1 * 9);
    m.params.conv2_bias = read_dense(in, CnnParams::kConv2, 1);
    nn::NetSpec spec;
    load_net(in, spec, m.params.head);
    if (spec.widths() != head_spec(m.seed).widths()) throw FormatError("cnn: unexpected head architecture");
    return m;
}

CnnModel cnn_train(std::span<const HsvTensor> tensors, std::span<const Sentiment> labels, const nn::TrainConfig& cfg,
                   std::uint64_t init_seed, CnnTrainInfo* info) {
    cfg.validate();
    if (tensors.empty()) throw ValidationError("cnn: no training images");
    if (tensors.size() != labels.size()) throw ValidationError("cnn: images and labels differ in length");
    const auto y = class_indices(labels);
    CnnModel model{init_seed, cnn_init(init_seed)};
    nn::AdamState<double> adam{cfg.lr, cfg.beta1, cfg.beta2, cfg.epsilon, 0, {}, {}};
    const std::size_t n = tensors.size();
    std::vector<HsvTensor> batch;
    std::vector<int> batch_labels;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        if (cfg.shuffle) {
            auto rng = CounterRng::stream(cfg.seed, "shuffle", epoch);
            shuffle(order, rng);
        }
        double epoch_loss = 0.0;
        for (std::size_t start = 0, batch_no = 0; start < n; start += cfg.batch_size, ++batch_no) {
            const std::size_t b = std::min(cfg.batch_size, n - start);
            batch.clear();
            batch_labels.clear();
            for (std::size_t k = 0; k < b; ++k) {
                batch.push_back(tensors[order[start + k]]);
                batch_labels.push_back(y[order[start + k]]);
            }
            const auto lg = cnn_loss_and_gradients(model.params, batch, batch_labels);
            if (!std::isfinite(lg.loss)) {
                throw nn::TrainingError("cnn: non-finite loss at epoch " + std::to_string(epoch + 1) + ", batch " +
                                        std::to_string(batch_no + 1));
            }
            const auto p = model.params.blocks();
            const auto g = lg.grads.blocks();
            nn::adam_step<double>(adam, p, g);
            epoch_loss += lg.loss * static_cast<double>(b);
        }
        if (info) info->epoch_losses.push_back(epoch_loss / static_cast<double>(n));
    }
    return model;
}

std::vector<ProbDist3> cnn_predict(const CnnModel& model, std::span<const HsvTensor> tensors) {
    std::vector<ProbDist3> out;
    if (tensors.empty()) return out;
    const Eigen::MatrixXd probs = nn::softmax_rows(cnn_logits(model.params, tensors));
    for (Eigen::Index i = 0; i < probs.rows(); ++i) out.push_back(to_prob(probs.row(i)));
    return out;
}

}  // namespace memesent
