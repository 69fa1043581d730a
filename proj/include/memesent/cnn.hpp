#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "memesent/binary_io.hpp"
#include "memesent/corpus.hpp"
#include "memesent/hsv.hpp"
#include "memesent/nn.hpp"
#include "memesent/prob.hpp"

namespace memesent {

/// Fixed image classifier over 32x32 HSV input:
///   conv 3x3, 8 filters (same padding) -> ReLU -> 2x2 max-pool
///   conv 3x3, 16 filters (same padding) -> ReLU -> 2x2 max-pool
///   flatten (16 x 8 x 8 = 1024) -> dense 64 -> ReLU -> dense 3
struct CnnParams {
    static constexpr std::size_t kConv1 = 8;
    static constexpr std::size_t kConv2 = 16;
    static constexpr std::size_t kHidden = 64;
    static constexpr std::size_t kFlat = kConv2 * (kHsvSide / 4) * (kHsvSide / 4);

    Eigen::MatrixXd conv1_weight;  // 8 x (3*9)
    Eigen::VectorXd conv1_bias;
    Eigen::MatrixXd conv2_weight;  // 16 x (8*9)
    Eigen::VectorXd conv2_bias;
    nn::MlpParams<double> head;    // 1024 -> 64 -> 3

    std::vector<std::span<double>> blocks();
    std::vector<std::span<const double>> blocks() const;
    CnnParams zeros_like() const;

    friend bool operator==(const CnnParams&, const CnnParams&) = default;
};

/// Conv filters ~ N(0, 2/fan_in) from the ("cnn_init") substream; the dense
/// head uses the fan-in scaled mode of nn::init_params. Biases are zero.
CnnParams cnn_init(std::uint64_t seed);

/// Logits for a batch (b x 3).
Eigen::MatrixXd cnn_logits(const CnnParams& params, std::span<const HsvTensor> batch);

/// Mean softmax cross-entropy over the batch and its gradient.
struct CnnLossGrad {
    double loss = 0.0;
    CnnParams grads;
};
CnnLossGrad cnn_loss_and_gradients(const CnnParams& params, std::span<const HsvTensor> batch,
                                   std::span<const int> labels);

/// Central-difference check over up to samples_per_block entries of every
/// parameter block; same relative-error definition as nn::grad_check.
nn::GradCheckResult cnn_grad_check(const CnnParams& params, std::span<const HsvTensor> batch,
                                   std::span<const int> labels, double eps = 1e-5,
                                   std::size_t samples_per_block = 16, std::uint64_t seed = 0);

struct CnnModel {
    std::uint64_t seed = 0;
    CnnParams params;

    void save(ByteWriter& out) const;
    static CnnModel load(ByteReader& in);
};

struct CnnTrainInfo {
    std::vector<double> epoch_losses;
};

/// Mini-batch Adam with nn's loss and optimizer. cfg.seed drives shuffling;
/// init_seed drives initialisation.
CnnModel cnn_train(std::span<const HsvTensor> tensors, std::span<const Sentiment> labels,
                   const nn::TrainConfig& cfg, std::uint64_t init_seed, CnnTrainInfo* info = nullptr);

std::vector<ProbDist3> cnn_predict(const CnnModel& model, std::span<const HsvTensor> tensors);

}  // namespace memesent
