#pragma once

// Uniform train / predict / persist over the five classifier kinds.

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "memesent/binary_io.hpp"
#include "memesent/cnn.hpp"
#include "memesent/corpus.hpp"
#include "memesent/embeddings.hpp"
#include "memesent/ffnn_model.hpp"
#include "memesent/fusion.hpp"
#include "memesent/naive_bayes.hpp"
#include "memesent/nn.hpp"
#include "memesent/prob.hpp"
#include "memesent/textprep.hpp"

namespace memesent {

enum class ModelKind { NaiveBayes, FfnnW2v, FfnnBow, CnnHsv, Fusion };

ModelKind parse_model_kind(std::string_view name);
std::string_view to_string(ModelKind kind) noexcept;
/// "text", "image" or "text-image".
std::string_view modality_of(ModelKind kind) noexcept;
bool needs_embeddings(ModelKind kind) noexcept;
bool needs_images(ModelKind kind) noexcept;

struct PipelineConfig {
    ModelKind kind = ModelKind::FfnnW2v;
    PrepConfig prep = PrepConfig::defaults();
    nn::NetSpec net;
    nn::TrainConfig train;
    nn::TrainConfig image_train;
    double nb_alpha = 1.0;
    std::size_t vocab_size = kDefaultBowSize;
    std::size_t folds = 5;
    bool out_of_fold = true;
    StackerConfig stacker;
    bool upsample = false;
    std::uint64_t seed = 0;

    /// Copy with every component seed set to s.
    PipelineConfig with_seed(std::uint64_t s) const;
};

/// Loads HSV inputs for records, resolving relative paths against root.
/// Loaded tensors are cached; safe to share between threads.
class ImageStore {
public:
    explicit ImageStore(std::filesystem::path root = {}) : root_(std::move(root)) {}

    const std::filesystem::path& root() const noexcept { return root_; }
    std::vector<HsvTensor> load(const Dataset& ds);

private:
    std::filesystem::path root_;
    std::mutex mu_;
    std::map<std::filesystem::path, HsvTensor> cache_;
};

struct Resources {
    const EmbeddingTable* embeddings = nullptr;
    ImageStore* images = nullptr;
};

/// Naive Bayes together with the preprocessing it was trained under.
struct NbTextModel {
    PrepConfig prep;
    NbModel nb;

    void save(ByteWriter& out) const;
    static NbTextModel load(ByteReader& in);
};

using AnyModel = std::variant<NbTextModel, FfnnW2vModel, FfnnBowModel, CnnModel, BimodalModel>;

ModelKind kind_of(const AnyModel& model) noexcept;

struct TrainSummary {
    std::size_t examples = 0;
    std::vector<double> epoch_losses;
    std::optional<double> all_oov_fraction;
};

/// Upsamples first when cfg.upsample is set.
AnyModel train_model(const Dataset& train, const PipelineConfig& cfg, Resources& res,
                     TrainSummary* summary = nullptr);

/// One distribution per record. The fusion model reports the softmax of its
/// one-vs-rest scores, which preserves the stacker's argmax.
std::vector<ProbDist3> predict_model(const AnyModel& model, const Dataset& ds, Resources& res);

std::vector<Sentiment> argmax_all(const std::vector<ProbDist3>& probs);

std::vector<std::uint8_t> encode_model(const AnyModel& model);
AnyModel decode_model(std::span<const std::uint8_t> bytes);
void save_model(const AnyModel& model, const std::filesystem::path& path);
AnyModel load_model(const std::filesystem::path& path);

/// Tokens of every caption after preprocessing, for vocabulary-filtered
/// embedding loads.
std::unordered_set<std::string> corpus_vocabulary(const Dataset& ds, const PrepConfig& prep);

}  // namespace memesent
