#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "memesent/binary_io.hpp"
#include "memesent/cnn.hpp"
#include "memesent/corpus.hpp"
#include "memesent/ffnn_model.hpp"
#include "memesent/prob.hpp"

namespace memesent {

/// Text distribution followed by image distribution.
inline constexpr std::size_t kFusionFeatures = 2 * kNumClasses;

using FusionMatrix = Eigen::Matrix<double, Eigen::Dynamic, static_cast<int>(kFusionFeatures)>;

/// One-vs-rest linear SVM over the concatenated branch distributions.
struct FusionStacker {
    Eigen::Matrix<double, kNumClasses, kFusionFeatures> weight = decltype(weight)::Zero();
    Eigen::Matrix<double, kNumClasses, 1> bias = decltype(bias)::Zero();

    void save(ByteWriter& out) const;
    static FusionStacker load(ByteReader& in);

    friend bool operator==(const FusionStacker&, const FusionStacker&) = default;
};

/// Hinge loss + L2 (bias unregularised), trained by per-example subgradient
/// steps with learning rate eta0 / (1 + eta0 * lambda * t).
struct StackerConfig {
    double lambda = 1e-3;
    std::size_t epochs = 200;
    double eta0 = 0.1;
    std::uint64_t seed = 0;
};

FusionMatrix fusion_features(std::span<const ProbDist3> text, std::span<const ProbDist3> image);

FusionStacker fusion_train(std::span<const ProbDist3> text_probs, std::span<const ProbDist3> image_probs,
                           std::span<const Sentiment> labels, const StackerConfig& cfg = {});

Eigen::Vector3d fusion_scores(const FusionStacker& stacker, const ProbDist3& text, const ProbDist3& image);

/// Argmax of the one-vs-rest scores; ties go to the lowest class index.
Sentiment fusion_predict(const FusionStacker& stacker, const ProbDist3& text, const ProbDist3& image);

struct BimodalConfig {
    nn::NetSpec text_spec;   ///< input_dim is replaced by the vocabulary size
    nn::TrainConfig text_train;
    nn::TrainConfig image_train;
    PrepConfig prep = PrepConfig::defaults();
    std::size_t vocab_size = kDefaultBowSize;
    std::size_t folds = 5;
    /// false trains the stacker on in-sample branch outputs (leaks; kept for comparison)
    bool out_of_fold = true;
    StackerConfig stacker;
    std::uint64_t seed = 0;  ///< fold assignment and branch initialisation
};

struct BimodalModel {
    FfnnBowModel text;
    CnnModel image;
    FusionStacker stacker;

    void save(ByteWriter& out) const;
    static BimodalModel load(ByteReader& in);
};

BimodalModel bimodal_train(std::span<const std::string> captions, std::span<const HsvTensor> images,
                           std::span<const Sentiment> labels, const BimodalConfig& cfg);

struct BimodalPrediction {
    Sentiment label;
    ProbDist3 text;
    ProbDist3 image;
};

std::vector<BimodalPrediction> bimodal_predict(const BimodalModel& model, std::span<const std::string> captions,
                                               std::span<const HsvTensor> images);

}  // namespace memesent
