#include "memesent/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "memesent/binary_io.hpp"
#include "memesent/csv.hpp"
#include "memesent/rng.hpp"

namespace memesent {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

Sentiment sentiment_from_index(std::size_t index) {
    if (index >= kNumClasses) {
        throw std::out_of_range("class index out of range: " + std::to_string(index));
    }
    return static_cast<Sentiment>(index);
}

std::string_view to_string(Sentiment s) noexcept {
    switch (s) {
        case Sentiment::Negative: return "negative";
        case Sentiment::Neutral: return "neutral";
        case Sentiment::Positive: return "positive";
    }
    return "?";
}

Sentiment normalize_label(std::string_view raw) {
    const std::string key = lower(trim(raw));
    if (key == "positive" || key == "very_positive") return Sentiment::Positive;
    if (key == "negative" || key == "very_negative") return Sentiment::Negative;
    if (key == "neutral") return Sentiment::Neutral;
    throw DatasetError("unrecognized sentiment label: '" + std::string(raw) + "'");
}

Schema Schema::memotion() {
    return Schema{.id_column = "image_name",
                  .caption_column = "text_corrected",
                  .label_column = "overall_sentiment",
                  .image_column = "image_name"};
}

Dataset::Dataset(std::vector<MemeRecord> records, Provenance provenance)
    : records_(std::move(records)), provenance_(std::move(provenance)) {
    std::unordered_set<std::string_view> seen;
    seen.reserve(records_.size());
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto& id = records_[i].id;
        if (id.empty()) throw DatasetError("record " + std::to_string(i) + " has an empty id");
        if (!seen.insert(id).second) throw DatasetError("duplicate id: '" + id + "'");
    }
}

bool Dataset::all_labeled() const noexcept {
    return std::all_of(records_.begin(), records_.end(),
                       [](const MemeRecord& r) { return r.label.has_value(); });
}

std::vector<Sentiment> Dataset::labels() const {
    std::vector<Sentiment> out;
    out.reserve(records_.size());
    for (const auto& r : records_) {
        if (!r.label) throw DatasetError("record '" + r.id + "' is unlabeled");
        out.push_back(*r.label);
    }
    return out;
}

std::vector<std::string> Dataset::captions() const {
    std::vector<std::string> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.caption);
    return out;
}

Dataset parse_dataset(std::string_view csv_text, const Schema& schema, std::string source) {
    const CsvTable table = parse_csv(csv_text);
    if (table.header.empty()) throw DatasetError("dataset is empty (no header row): " + source);

    auto require = [&](const std::string& name, const char* role) {
        auto col = table.column(name);
        if (!col) {
            throw DatasetError("missing " + std::string(role) + " column '" + name + "' in " +
                               (source.empty() ? std::string("input") : source));
        }
        return *col;
    };
    const std::size_t id_col = require(schema.id_column, "id");
    const std::size_t caption_col = require(schema.caption_column, "caption");
    std::optional<std::size_t> label_col;
    if (!schema.label_column.empty()) label_col = require(schema.label_column, "label");
    std::optional<std::size_t> image_col;
    if (!schema.image_column.empty()) image_col = table.column(schema.image_column);

    std::vector<MemeRecord> records;
    records.reserve(table.rows.size());
    std::string bad_rows;
    std::size_t bad_count = 0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        MemeRecord rec;
        rec.id = std::string(trim(row[id_col]));
        rec.caption = row[caption_col];
        if (image_col && !trim(row[*image_col]).empty()) rec.image_path = std::string(trim(row[*image_col]));
        if (label_col && !trim(row[*label_col]).empty()) {
            try {
                rec.label = normalize_label(row[*label_col]);
            } catch (const DatasetError&) {
                if (bad_count < 20) {
                    bad_rows += "\n  line " + std::to_string(table.row_lines[r]) + ": '" +
                                row[*label_col] + "'";
                }
                ++bad_count;
                continue;
            }
        }
        if (rec.id.empty()) {
            throw DatasetError("line " + std::to_string(table.row_lines[r]) + ": empty id");
        }
        records.push_back(std::move(rec));
    }
    if (bad_count > 0) {
        throw DatasetError(std::to_string(bad_count) + " row(s) with unrecognized labels in " +
                           (source.empty() ? std::string("input") : source) + ":" + bad_rows);
    }
    return Dataset(std::move(records), Provenance{std::move(source), kDatasetSchemaVersion});
}

Dataset load_dataset(const std::filesystem::path& path, const Schema& schema) {
    if (!std::filesystem::exists(path)) throw DatasetError("dataset file not found: " + path.string());
    return parse_dataset(read_text_file(path), schema, path.string());
}

std::string format_dataset(const Dataset& ds) {
    std::string out = csv_row({"id", "caption", "image_path", "label"});
    for (const auto& r : ds) {
        out += csv_row({r.id, r.caption, r.image_path.value_or(""),
                        r.label ? std::string(to_string(*r.label)) : std::string()});
    }
    return out;
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
    write_text_file(path, format_dataset(ds));
}

ClassStats class_stats(const Dataset& ds) {
    if (ds.empty()) throw DatasetError("class statistics of an empty dataset are undefined");
    ClassStats stats;
    for (const auto s : ds.labels()) ++stats.counts[index_of(s)];
    stats.total = ds.size();
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        stats.fractions[c] = static_cast<double>(stats.counts[c]) / static_cast<double>(stats.total);
    }
    return stats;
}

nlohmann::json to_json(const ClassStats& stats) {
    nlohmann::json j;
    j["total"] = stats.total;
    for (const auto s : kAllSentiments) {
        j["counts"][std::string(to_string(s))] = stats.count(s);
        j["fractions"][std::string(to_string(s))] = stats.fraction(s);
    }
    return j;
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double train_fraction,
                                             std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ValidationError("train fraction must lie strictly between 0 and 1, got " +
                              std::to_string(train_fraction));
    }
    const auto labels = ds.labels();
    std::array<std::vector<std::size_t>, kNumClasses> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[index_of(labels[i])].push_back(i);

    std::vector<bool> in_val(ds.size(), false);
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        auto& members = by_class[c];
        const double n = static_cast<double>(members.size());
        // The tolerance keeps exact products such as 0.2 * 10 from flooring to 1.
        const auto n_val = static_cast<std::size_t>(std::floor(n - train_fraction * n + 1e-9));
        auto rng = CounterRng::stream(seed, "split", c);
        shuffle(members, rng);
        for (std::size_t k = 0; k < n_val; ++k) in_val[members[k]] = true;
    }

    std::vector<MemeRecord> train, val;
    for (std::size_t i = 0; i < ds.size(); ++i) (in_val[i] ? val : train).push_back(ds[i]);
    const auto& prov = ds.provenance();
    return {Dataset(std::move(train), {prov.source + "#train", prov.schema_version}),
            Dataset(std::move(val), {prov.source + "#val", prov.schema_version})};
}

Dataset upsample(const Dataset& ds, std::uint64_t seed) {
    if (ds.empty()) throw DatasetError("cannot upsample an empty dataset");
    const auto labels = ds.labels();
    std::array<std::vector<std::size_t>, kNumClasses> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[index_of(labels[i])].push_back(i);
    std::size_t target = 0;
    for (const auto& members : by_class) target = std::max(target, members.size());

    std::vector<MemeRecord> out(ds.records());
    std::size_t copy_no = 0;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        const auto& members = by_class[c];
        if (members.empty()) continue;
        auto rng = CounterRng::stream(seed, "upsample", c);
        for (std::size_t k = members.size(); k < target; ++k) {
            MemeRecord copy = ds[members[rng.uniform_index(members.size())]];
            copy.id += "~up" + std::to_string(copy_no++);
            out.push_back(std::move(copy));
        }
    }
    const auto& prov = ds.provenance();
    return Dataset(std::move(out), {prov.source + "#upsampled", prov.schema_version});
}

}  // namespace memesent
