#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "memesent/errors.hpp"

namespace memesent {

/// Subtask-A sentiment. The numeric values are the class indices used by
/// every model and report, and are part of the on-disk formats.
enum class Sentiment : std::uint8_t { Negative = 0, Neutral = 1, Positive = 2 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<Sentiment, kNumClasses> kAllSentiments = {
    Sentiment::Negative, Sentiment::Neutral, Sentiment::Positive};

constexpr std::size_t index_of(Sentiment s) noexcept { return static_cast<std::size_t>(s); }
Sentiment sentiment_from_index(std::size_t index);
std::string_view to_string(Sentiment s) noexcept;

class DatasetError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Case-insensitive; accepts the 5-level annotation and collapses it:
/// very_positive/positive -> Positive, very_negative/negative -> Negative,
/// neutral -> Neutral. Surrounding whitespace is ignored.
Sentiment normalize_label(std::string_view raw);

struct MemeRecord {
    std::string id;
    std::string caption;
    std::optional<std::string> image_path;
    std::optional<Sentiment> label;

    friend bool operator==(const MemeRecord&, const MemeRecord&) = default;
};

/// Column names used to read a CSV. Empty label/image names mean the
/// column is not mapped.
struct Schema {
    std::string id_column = "id";
    std::string caption_column = "caption";
    std::string label_column = "label";
    std::string image_column = "image_path";

    /// Layout of the released Memotion 7k labels file.
    static Schema memotion();
    /// Layout written by write_dataset().
    static Schema canonical() { return {}; }
};

inline constexpr std::uint32_t kDatasetSchemaVersion = 1;

struct Provenance {
    std::string source;
    std::uint32_t schema_version = kDatasetSchemaVersion;
};

/// Ordered, immutable collection of records with unique non-empty ids.
class Dataset {
public:
    Dataset() = default;
    /// Throws DatasetError on an empty or duplicate id.
    Dataset(std::vector<MemeRecord> records, Provenance provenance = {});

    const std::vector<MemeRecord>& records() const noexcept { return records_; }
    const Provenance& provenance() const noexcept { return provenance_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    const MemeRecord& operator[](std::size_t i) const { return records_[i]; }
    auto begin() const noexcept { return records_.begin(); }
    auto end() const noexcept { return records_.end(); }

    bool all_labeled() const noexcept;
    /// Labels in record order. Throws DatasetError if any record is unlabeled.
    std::vector<Sentiment> labels() const;
    std::vector<std::string> captions() const;

private:
    std::vector<MemeRecord> records_;
    Provenance provenance_;
};

/// Reads a UTF-8 CSV with a header row. Every row with an unrecognised label
/// is reported (by source line) in a single DatasetError. An empty label
/// cell yields an unlabeled record.
Dataset load_dataset(const std::filesystem::path& path, const Schema& schema);
Dataset parse_dataset(std::string_view csv_text, const Schema& schema, std::string source = {});

/// Canonical CSV (id, caption, image_path, label); loads back with Schema::canonical().
std::string format_dataset(const Dataset& ds);
void write_dataset(const Dataset& ds, const std::filesystem::path& path);

struct ClassStats {
    std::array<std::size_t, kNumClasses> counts{};
    std::array<double, kNumClasses> fractions{};
    std::size_t total = 0;

    std::size_t count(Sentiment s) const noexcept { return counts[index_of(s)]; }
    double fraction(Sentiment s) const noexcept { return fractions[index_of(s)]; }
};

ClassStats class_stats(const Dataset& ds);
nlohmann::json to_json(const ClassStats& stats);

/// Per class c, floor((1 - train_fraction) * n_c) randomly chosen records go
/// to validation and the rest to train. Both parts keep the source order.
std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double train_fraction,
                                             std::uint64_t seed);

/// Random oversampling with replacement until every present class matches
/// the majority count. Originals come first, unchanged; copies are appended
/// with ids "<original id>~up<n>" so ids stay unique.
Dataset upsample(const Dataset& ds, std::uint64_t seed);

}  // namespace memesent
