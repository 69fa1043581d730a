#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memesent/binary_io.hpp"
#include "memesent/bow.hpp"
#include "memesent/corpus.hpp"
#include "memesent/embeddings.hpp"
#include "memesent/nn.hpp"
#include "memesent/prob.hpp"
#include "memesent/textprep.hpp"

namespace memesent {

void save_net(ByteWriter& out, const nn::NetSpec& spec, const nn::MlpParams<double>& params);
/// Reads a network written by save_net and checks every shape against the spec.
void load_net(ByteReader& in, nn::NetSpec& spec, nn::MlpParams<double>& params);

void save_prep(ByteWriter& out, const PrepConfig& cfg);
PrepConfig load_prep(ByteReader& in);

std::vector<int> class_indices(std::span<const Sentiment> labels);
ProbDist3 to_prob(const Eigen::Ref<const Eigen::RowVectorXd>& row);
std::vector<TokenList> preprocess_all(std::span<const std::string> captions, const PrepConfig& cfg);

/// Caption -> tokens -> mean Word2Vec embedding -> MLP.
struct FfnnW2vModel {
    PrepConfig prep;
    nn::NetSpec spec;
    nn::MlpParams<double> params;
    std::string embedding_source;  // informational

    void save(ByteWriter& out) const;
    static FfnnW2vModel load(ByteReader& in);
};

struct FfnnTrainInfo {
    std::vector<double> epoch_losses;
    double all_oov_fraction = 0.0;
};

FfnnW2vModel ffnn_w2v_train(std::span<const std::string> captions, std::span<const Sentiment> labels,
                            const EmbeddingTable& table, const nn::NetSpec& spec, const nn::TrainConfig& cfg,
                            const PrepConfig& prep = PrepConfig::defaults(), FfnnTrainInfo* info = nullptr);

struct CaptionPrediction {
    ProbDist3 probs;
    bool all_oov = false;  ///< no in-vocabulary token; prediction comes from the zero vector
};

CaptionPrediction ffnn_w2v_predict(const FfnnW2vModel& model, std::string_view caption,
                                   const EmbeddingTable& table);
std::vector<CaptionPrediction> ffnn_w2v_predict(const FfnnW2vModel& model,
                                                std::span<const std::string> captions,
                                                const EmbeddingTable& table);

/// Caption -> tokens -> presence vector over a training vocabulary -> MLP.
/// This is the text branch of the bimodal classifier.
struct FfnnBowModel {
    PrepConfig prep;
    BowVocab vocab;
    nn::NetSpec spec;
    nn::MlpParams<double> params;

    void save(ByteWriter& out) const;
    static FfnnBowModel load(ByteReader& in);
};

/// spec.input_dim is replaced by the size of the vocabulary built from captions.
FfnnBowModel ffnn_bow_train(std::span<const std::string> captions, std::span<const Sentiment> labels,
                            nn::NetSpec spec, const nn::TrainConfig& cfg,
                            const PrepConfig& prep = PrepConfig::defaults(),
                            std::size_t vocab_size = kDefaultBowSize, FfnnTrainInfo* info = nullptr);

std::vector<ProbDist3> ffnn_bow_predict(const FfnnBowModel& model, std::span<const std::string> captions);

}  // namespace memesent
