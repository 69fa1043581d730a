#pragma once

// Dense feed-forward classifier: affine layers with ReLU between them,
// softmax cross-entropy on the logits, Adam updates. Batches are row-major
// in the sense that each row of an input matrix is one example.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "memesent/errors.hpp"
#include "memesent/rng.hpp"

namespace memesent::nn {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class Activation : std::uint8_t { ReLU = 0, Identity = 1 };

enum class InitMode : std::uint8_t {
    Normal = 0,  ///< N(0, sigma^2)
    FanIn = 1,   ///< N(0, sigma^2 * 2 / fan_in)
};

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NetSpec {
    std::size_t input_dim = 300;
    std::vector<std::size_t> hidden = {256, 128, 64, 64, 32, 16};
    std::size_t output_dim = 3;
    Activation activation = Activation::ReLU;
    std::uint64_t seed = 0;
    double init_sigma = 1.0;
    InitMode init_mode = InitMode::Normal;

    /// input, hidden..., output
    std::vector<std::size_t> widths() const {
        std::vector<std::size_t> w{input_dim};
        w.insert(w.end(), hidden.begin(), hidden.end());
        w.push_back(output_dim);
        return w;
    }

    void validate() const {
        for (auto w : widths()) {
            if (w == 0) throw ValidationError("network widths must all be >= 1");
        }
        if (!(init_sigma >= 0.0) || !std::isfinite(init_sigma)) {
            throw ValidationError("init_sigma must be finite and >= 0");
        }
    }

    friend bool operator==(const NetSpec&, const NetSpec&) = default;
};

template <typename Scalar>
struct DenseLayer {
    Matrix<Scalar> weight;  // out x in
    Vector<Scalar> bias;    // out

    std::size_t in() const noexcept { return static_cast<std::size_t>(weight.cols()); }
    std::size_t out() const noexcept { return static_cast<std::size_t>(weight.rows()); }
};

template <typename Scalar>
struct MlpParams {
    std::vector<DenseLayer<Scalar>> layers;
    Activation activation = Activation::ReLU;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in(); }
    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().out(); }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
        return n;
    }

    /// Same shapes, all zeros.
    MlpParams zeros_like() const {
        MlpParams z;
        z.activation = activation;
        for (const auto& l : layers) {
            z.layers.push_back({Matrix<Scalar>::Zero(l.weight.rows(), l.weight.cols()),
                                Vector<Scalar>::Zero(l.bias.size())});
        }
        return z;
    }

    /// Flat views: weight0, bias0, weight1, bias1, ...
    std::vector<std::span<Scalar>> blocks() {
        std::vector<std::span<Scalar>> out;
        for (auto& l : layers) {
            out.emplace_back(l.weight.data(), static_cast<std::size_t>(l.weight.size()));
            out.emplace_back(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
        }
        return out;
    }
    std::vector<std::span<const Scalar>> blocks() const {
        std::vector<std::span<const Scalar>> out;
        for (const auto& l : layers) {
            out.emplace_back(l.weight.data(), static_cast<std::size_t>(l.weight.size()));
            out.emplace_back(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
        }
        return out;
    }

    bool all_finite() const {
        return std::all_of(layers.begin(), layers.end(), [](const auto& l) {
            return l.weight.allFinite() && l.bias.allFinite();
        });
    }

    friend bool operator==(const MlpParams& a, const MlpParams& b) {
        if (a.activation != b.activation || a.layers.size() != b.layers.size()) return false;
        for (std::size_t i = 0; i < a.layers.size(); ++i) {
            const auto& x = a.layers[i];
            const auto& y = b.layers[i];
            if (x.weight.rows() != y.weight.rows() || x.weight.cols() != y.weight.cols()) return false;
            if (x.weight != y.weight || x.bias != y.bias) return false;
        }
        return true;
    }
};

/// Weights drawn row by row from the "init" substream of spec.seed; biases zero.
template <typename Scalar = double>
MlpParams<Scalar> init_params(const NetSpec& spec) {
    spec.validate();
    auto rng = CounterRng::stream(spec.seed, "init");
    const auto widths = spec.widths();
    MlpParams<Scalar> p;
    p.activation = spec.activation;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const auto in = static_cast<Eigen::Index>(widths[l]);
        const auto out = static_cast<Eigen::Index>(widths[l + 1]);
        double sigma = spec.init_sigma;
        if (spec.init_mode == InitMode::FanIn) sigma *= std::sqrt(2.0 / static_cast<double>(in));
        DenseLayer<Scalar> layer{Matrix<Scalar>(out, in), Vector<Scalar>::Zero(out)};
        for (Eigen::Index r = 0; r < out; ++r) {
            for (Eigen::Index c = 0; c < in; ++c) layer.weight(r, c) = static_cast<Scalar>(sigma * rng.normal());
        }
        p.layers.push_back(std::move(layer));
    }
    return p;
}

template <typename Scalar>
struct ForwardCache {
    std::vector<Matrix<Scalar>> inputs;  // input to layer l (b x in_l)
    std::vector<Matrix<Scalar>> pre;     // pre-activation of layer l (b x out_l)
};

template <typename Scalar>
struct ForwardResult {
    Matrix<Scalar> logits;  // b x output_dim
    ForwardCache<Scalar> cache;
};

template <typename Scalar, typename Derived>
ForwardResult<Scalar> forward(const MlpParams<Scalar>& params, const Eigen::MatrixBase<Derived>& batch) {
    if (params.layers.empty()) throw ShapeError("forward: network has no layers");
    if (static_cast<std::size_t>(batch.cols()) != params.input_dim()) {
        throw ShapeError("forward: batch width " + std::to_string(batch.cols()) + " != input_dim " +
                         std::to_string(params.input_dim()));
    }
    ForwardResult<Scalar> r;
    Matrix<Scalar> x = batch.template cast<Scalar>();
    const std::size_t n_layers = params.layers.size();
    r.cache.inputs.reserve(n_layers);
    r.cache.pre.reserve(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        const auto& layer = params.layers[l];
        Matrix<Scalar> z = x * layer.weight.transpose();
        z.rowwise() += layer.bias.transpose();
        r.cache.inputs.push_back(std::move(x));
        if (l + 1 == n_layers) {
            r.logits = z;
        } else if (params.activation == Activation::ReLU) {
            x = z.cwiseMax(Scalar(0));
        } else {
            x = z;
        }
        r.cache.pre.push_back(std::move(z));
    }
    return r;
}

/// Row-wise softmax with max subtraction.
template <typename Derived>
auto softmax_rows(const Eigen::MatrixBase<Derived>& logits) {
    using Scalar = typename Derived::Scalar;
    Matrix<Scalar> p = logits;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        const Scalar m = p.row(i).maxCoeff();
        p.row(i) = (p.row(i).array() - m).exp().matrix();
        p.row(i) /= p.row(i).sum();
    }
    return p;
}

template <typename Scalar>
struct LossResult {
    Scalar loss;             // mean over the batch
    Matrix<Scalar> dlogits;  // (softmax - onehot) / b
};

template <typename Derived>
LossResult<typename Derived::Scalar> softmax_xent(const Eigen::MatrixBase<Derived>& logits,
                                                  std::span<const int> labels) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index b = logits.rows();
    if (static_cast<std::size_t>(b) != labels.size()) {
        throw ShapeError("softmax_xent: " + std::to_string(b) + " rows but " + std::to_string(labels.size()) +
                         " labels");
    }
    if (b == 0) throw ShapeError("softmax_xent: empty batch");
    LossResult<Scalar> r{Scalar(0), Matrix<Scalar>(b, logits.cols())};
    for (Eigen::Index i = 0; i < b; ++i) {
        const int y = labels[static_cast<std::size_t>(i)];
        if (y < 0 || y >= logits.cols()) {
            throw std::out_of_range("softmax_xent: label " + std::to_string(y) + " out of range");
        }
        const Scalar m = logits.row(i).maxCoeff();
        const auto shifted = (logits.row(i).array() - m).eval();
        const Scalar sum = shifted.exp().sum();
        const Scalar log_sum = std::log(sum);
        r.loss += log_sum - shifted(y);
        r.dlogits.row(i) = (shifted.exp() / sum).matrix();
        r.dlogits(i, y) -= Scalar(1);
    }
    r.loss /= static_cast<Scalar>(b);
    r.dlogits /= static_cast<Scalar>(b);
    return r;
}

/// Gradients of the loss whose logit gradient is dlogits, in MlpParams
/// layout. ReLU'(0) is taken as 0. When dinput is given it receives the
/// gradient with respect to the network input (b x input_dim).
template <typename Scalar, typename Derived>
MlpParams<Scalar> backward(const MlpParams<Scalar>& params, const ForwardCache<Scalar>& cache,
                           const Eigen::MatrixBase<Derived>& dlogits, Matrix<Scalar>* dinput = nullptr) {
    const std::size_t n_layers = params.layers.size();
    if (cache.inputs.size() != n_layers || cache.pre.size() != n_layers) {
        throw ShapeError("backward: cache does not match the network");
    }
    if (dlogits.rows() != cache.pre.back().rows() ||
        static_cast<std::size_t>(dlogits.cols()) != params.output_dim()) {
        throw ShapeError("backward: dlogits shape does not match the forward pass");
    }
    MlpParams<Scalar> grads;
    grads.activation = params.activation;
    grads.layers.resize(n_layers);
    Matrix<Scalar> dz = dlogits;
    for (std::size_t l = n_layers; l-- > 0;) {
        const auto& layer = params.layers[l];
        grads.layers[l].weight = dz.transpose() * cache.inputs[l];
        grads.layers[l].bias = dz.colwise().sum().transpose();
        if (l == 0) {
            if (dinput) *dinput = dz * layer.weight;
            break;
        }
        Matrix<Scalar> dx = dz * layer.weight;
        if (params.activation == Activation::ReLU) {
            dx.array() *= (cache.pre[l - 1].array() > Scalar(0)).template cast<Scalar>();
        }
        dz = std::move(dx);
    }
    return grads;
}

template <typename Scalar>
struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t t = 0;
    std::vector<Vector<Scalar>> m;
    std::vector<Vector<Scalar>> v;
};

/// One bias-corrected Adam update over matching parameter/gradient blocks.
/// Moment buffers are allocated on the first call.
template <typename Scalar>
void adam_step(AdamState<Scalar>& state, std::span<const std::span<Scalar>> params,
               std::span<const std::span<const Scalar>> grads) {
    if (params.size() != grads.size()) throw ShapeError("adam_step: block count mismatch");
    if (state.m.empty()) {
        for (const auto& p : params) {
            state.m.push_back(Vector<Scalar>::Zero(static_cast<Eigen::Index>(p.size())));
            state.v.push_back(Vector<Scalar>::Zero(static_cast<Eigen::Index>(p.size())));
        }
    }
    if (state.m.size() != params.size()) throw ShapeError("adam_step: state does not match parameters");
    ++state.t;
    const double t = static_cast<double>(state.t);
    const Scalar c1 = static_cast<Scalar>(1.0 - std::pow(state.beta1, t));
    const Scalar c2 = static_cast<Scalar>(1.0 - std::pow(state.beta2, t));
    const auto b1 = static_cast<Scalar>(state.beta1);
    const auto b2 = static_cast<Scalar>(state.beta2);
    const auto lr = static_cast<Scalar>(state.lr);
    const auto eps = static_cast<Scalar>(state.epsilon);
    for (std::size_t k = 0; k < params.size(); ++k) {
        if (params[k].size() != grads[k].size() ||
            params[k].size() != static_cast<std::size_t>(state.m[k].size())) {
            throw ShapeError("adam_step: block " + std::to_string(k) + " size mismatch");
        }
        Eigen::Map<Vector<Scalar>> p(params[k].data(), static_cast<Eigen::Index>(params[k].size()));
        Eigen::Map<const Vector<Scalar>> g(grads[k].data(), static_cast<Eigen::Index>(grads[k].size()));
        auto& m = state.m[k];
        auto& v = state.v[k];
        m = b1 * m + (Scalar(1) - b1) * g;
        v = b2 * v + (Scalar(1) - b2) * g.cwiseProduct(g);
        p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
    }
}

template <typename Scalar>
void adam_step(AdamState<Scalar>& state, MlpParams<Scalar>& params, const MlpParams<Scalar>& grads) {
    const auto p = params.blocks();
    const auto g = grads.blocks();
    adam_step<Scalar>(state, p, g);
}

struct TrainConfig {
    std::size_t batch_size = 50;
    std::size_t epochs = 10;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 0;  ///< drives the "shuffle" substream
    bool shuffle = true;

    void validate() const {
        if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
        if (epochs < 1) throw ValidationError("epochs must be >= 1");
        if (!(lr > 0.0)) throw ValidationError("learning rate must be > 0");
    }
};

template <typename Scalar>
struct TrainResult {
    MlpParams<Scalar> params;
    std::vector<double> epoch_losses;  ///< example-weighted mean loss per epoch
};

/// Mini-batch Adam from the given starting parameters. Each epoch visits a
/// fresh permutation from the ("shuffle", epoch) substream; the last batch
/// may be short.
template <typename Scalar, typename Derived>
TrainResult<Scalar> train(MlpParams<Scalar> params, const Eigen::MatrixBase<Derived>& data,
                          std::span<const int> labels, const TrainConfig& cfg) {
    cfg.validate();
    const auto n = static_cast<std::size_t>(data.rows());
    if (n == 0) throw ValidationError("train: no training examples");
    if (labels.size() != n) throw ShapeError("train: labels are not aligned with data rows");
    if (static_cast<std::size_t>(data.cols()) != params.input_dim()) {
        throw ShapeError("train: data width does not match the network input");
    }
    const Matrix<Scalar> x = data.template cast<Scalar>();
    AdamState<Scalar> adam{cfg.lr, cfg.beta1, cfg.beta2, cfg.epsilon, 0, {}, {}};
    TrainResult<Scalar> result;

    std::vector<std::size_t> order(n);
    Matrix<Scalar> batch;
    std::vector<int> batch_labels;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        if (cfg.shuffle) {
            auto rng = CounterRng::stream(cfg.seed, "shuffle", epoch);
            memesent::shuffle(order, rng);
        }
        double epoch_loss = 0.0;
        for (std::size_t start = 0, batch_no = 0; start < n; start += cfg.batch_size, ++batch_no) {
            const std::size_t b = std::min(cfg.batch_size, n - start);
            batch.resize(static_cast<Eigen::Index>(b), x.cols());
            batch_labels.resize(b);
            for (std::size_t k = 0; k < b; ++k) {
                batch.row(static_cast<Eigen::Index>(k)) = x.row(static_cast<Eigen::Index>(order[start + k]));
                batch_labels[k] = labels[order[start + k]];
            }
            const auto fwd = forward(params, batch);
            const auto loss = softmax_xent(fwd.logits, batch_labels);
            if (!std::isfinite(static_cast<double>(loss.loss))) {
                throw TrainingError("non-finite loss at epoch " + std::to_string(epoch + 1) + ", batch " +
                                    std::to_string(batch_no + 1));
            }
            const auto grads = backward(params, fwd.cache, loss.dlogits);
            adam_step(adam, params, grads);
            epoch_loss += static_cast<double>(loss.loss) * static_cast<double>(b);
        }
        result.epoch_losses.push_back(epoch_loss / static_cast<double>(n));
    }
    result.params = std::move(params);
    return result;
}

template <typename Scalar = double, typename Derived>
TrainResult<Scalar> train(const NetSpec& spec, const Eigen::MatrixBase<Derived>& data,
                          std::span<const int> labels, const TrainConfig& cfg) {
    return train(init_params<Scalar>(spec), data, labels, cfg);
}

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::size_t checked = 0;
};

/// Central2: (f(x+h) - f(x-h)) / 2h.
/// Central4: (f(x-2h) - 8f(x-h) + 8f(x+h) - f(x+2h)) / 12h, for smooth nets.
enum class Stencil { Central2, Central4 };

/// Compares analytic gradients against central differences of the mean
/// softmax cross-entropy. Up to samples_per_block entries of every weight
/// and bias block are checked (all of them when the block is smaller).
/// relative error = |a - n| / max(floor, |a| + |n|).
template <typename Scalar>
GradCheckResult compare_gradients(MlpParams<Scalar> params, const MlpParams<Scalar>& analytic,
                                  const Matrix<Scalar>& batch, std::span<const int> labels, double eps,
                                  std::size_t samples_per_block, std::uint64_t seed = 0, double floor = 1e-8,
                                  Stencil stencil = Stencil::Central2) {
    auto loss_at = [&](const MlpParams<Scalar>& p) { return softmax_xent(forward(p, batch).logits, labels).loss; };
    auto param_blocks = params.blocks();
    const auto grad_blocks = analytic.blocks();
    auto rng = CounterRng::stream(seed, "gradcheck");
    GradCheckResult r;
    for (std::size_t k = 0; k < param_blocks.size(); ++k) {
        auto block = param_blocks[k];
        std::vector<std::size_t> idx;
        if (block.size() <= samples_per_block) {
            for (std::size_t i = 0; i < block.size(); ++i) idx.push_back(i);
        } else {
            for (std::size_t s = 0; s < samples_per_block; ++s) idx.push_back(rng.uniform_index(block.size()));
        }
        for (const auto i : idx) {
            const Scalar saved = block[i];
            auto loss_shifted = [&](double steps) {
                block[i] = static_cast<Scalar>(saved + steps * eps);
                return loss_at(params);
            };
            Scalar diff;
            if (stencil == Stencil::Central2) {
                diff = (loss_shifted(1) - loss_shifted(-1)) / static_cast<Scalar>(2.0 * eps);
            } else {
                diff = (loss_shifted(-2) - 8 * loss_shifted(-1) + 8 * loss_shifted(1) - loss_shifted(2)) /
                       static_cast<Scalar>(12.0 * eps);
            }
            block[i] = saved;
            const double numeric = static_cast<double>(diff);
            const double a = static_cast<double>(grad_blocks[k][i]);
            const double rel = std::abs(a - numeric) / std::max(floor, std::abs(a) + std::abs(numeric));
            r.max_relative_error = std::max(r.max_relative_error, rel);
            ++r.checked;
        }
    }
    return r;
}

template <typename Scalar>
GradCheckResult grad_check(const MlpParams<Scalar>& params, const Matrix<Scalar>& batch,
                           std::span<const int> labels, double eps = 1e-5,
                           std::size_t samples_per_block = 64, std::uint64_t seed = 0, double floor = 1e-8,
                           Stencil stencil = Stencil::Central2) {
    const auto fwd = forward(params, batch);
    const auto loss = softmax_xent(fwd.logits, labels);
    const auto analytic = backward(params, fwd.cache, loss.dlogits);
    return compare_gradients(params, analytic, batch, labels, eps, samples_per_block, seed, floor, stencil);
}

template <typename Scalar = double>
GradCheckResult grad_check(const NetSpec& spec, const Matrix<Scalar>& batch, std::span<const int> labels,
                           double eps = 1e-5, std::size_t samples_per_block = 64,
                           Stencil stencil = Stencil::Central2) {
    return grad_check(init_params<Scalar>(spec), batch, labels, eps, samples_per_block, spec.seed, 1e-8, stencil);
}

/// Class probabilities for each row.
template <typename Scalar, typename Derived>
Matrix<Scalar> predict_proba(const MlpParams<Scalar>& params, const Eigen::MatrixBase<Derived>& data) {
    return softmax_rows(forward(params, data).logits);
}

}  // namespace memesent::nn
