#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "memesent/corpus.hpp"

namespace memesent {

/// counts[gold][predicted]
struct ConfusionMatrix {
    std::array<std::array<std::size_t, kNumClasses>, kNumClasses> counts{};

    std::size_t total() const noexcept;
    bool is_diagonal() const noexcept;

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion_matrix(std::span<const Sentiment> preds, std::span<const Sentiment> golds);

struct RunMetadata {
    std::string model;
    std::string modality;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string timestamp;  ///< ISO-8601 UTC; left empty for reproducible output
};

struct EvalReport {
    ConfusionMatrix confusion;
    std::array<double, kNumClasses> precision{};
    std::array<double, kNumClasses> recall{};
    std::array<double, kNumClasses> f1{};
    double macro_f1 = 0.0;
    RunMetadata meta;
};

/// Per-class precision, recall and F1 from a confusion matrix, with every
/// 0/0 taken as 0; macro-F1 is the unweighted mean over the three classes.
EvalReport evaluate(const ConfusionMatrix& cm);

/// Throws ValidationError on a length mismatch or empty input.
EvalReport macro_f1(std::span<const Sentiment> preds, std::span<const Sentiment> golds);

/// Predicts the most frequent training class (lowest index on ties) for
/// every evaluation example.
EvalReport majority_baseline(std::span<const Sentiment> train_golds, std::span<const Sentiment> eval_golds);

nlohmann::json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);
std::string format_text(const EvalReport& report);

}  // namespace memesent
