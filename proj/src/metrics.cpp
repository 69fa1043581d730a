#include "memesent/metrics.hpp"

#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace memesent {

namespace {

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

std::size_t ConfusionMatrix::total() const noexcept {
    std::size_t n = 0;
    for (const auto& row : counts) {
        for (auto v : row) n += v;
    }
    return n;
}

bool ConfusionMatrix::is_diagonal() const noexcept {
    for (std::size_t g = 0; g < kNumClasses; ++g) {
        for (std::size_t p = 0; p < kNumClasses; ++p) {
            if (g != p && counts[g][p] != 0) return false;
        }
    }
    return true;
}

ConfusionMatrix confusion_matrix(std::span<const Sentiment> preds, std::span<const Sentiment> golds) {
    if (preds.size() != golds.size()) {
        throw ValidationError("prediction count " + std::to_string(preds.size()) + " does not match gold count " +
                              std::to_string(golds.size()));
    }
    if (preds.empty()) throw ValidationError("cannot score an empty prediction list");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < preds.size(); ++i) ++cm.counts[index_of(golds[i])][index_of(preds[i])];
    return cm;
}

EvalReport evaluate(const ConfusionMatrix& cm) {
    EvalReport r;
    r.confusion = cm;
    double sum = 0.0;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        double tp = static_cast<double>(cm.counts[c][c]);
        double predicted = 0.0, actual = 0.0;
        for (std::size_t k = 0; k < kNumClasses; ++k) {
            predicted += static_cast<double>(cm.counts[k][c]);
            actual += static_cast<double>(cm.counts[c][k]);
        }
        r.precision[c] = safe_div(tp, predicted);
        r.recall[c] = safe_div(tp, actual);
        r.f1[c] = safe_div(2.0 * r.precision[c] * r.recall[c], r.precision[c] + r.recall[c]);
        sum += r.f1[c];
    }
    r.macro_f1 = sum / static_cast<double>(kNumClasses);
    return r;
}

EvalReport macro_f1(std::span<const Sentiment> preds, std::span<const Sentiment> golds) {
    return evaluate(confusion_matrix(preds, golds));
}

EvalReport majority_baseline(std::span<const Sentiment> train_golds, std::span<const Sentiment> eval_golds) {
    if (train_golds.empty()) throw ValidationError("majority baseline needs a nonempty training set");
    std::array<std::size_t, kNumClasses> counts{};
    for (auto s : train_golds) ++counts[index_of(s)];
    std::size_t best = 0;
    for (std::size_t c = 1; c < kNumClasses; ++c) {
        if (counts[c] > counts[best]) best = c;
    }
    const std::vector<Sentiment> preds(eval_golds.size(), static_cast<Sentiment>(best));
    auto report = macro_f1(preds, eval_golds);
    report.meta.model = "majority";
    report.meta.modality = "none";
    return report;
}

nlohmann::json to_json(const EvalReport& r) {
    nlohmann::json j;
    j["macro_f1"] = r.macro_f1;
    j["confusion"] = r.confusion.counts;
    j["labels"] = {"negative", "neutral", "positive"};
    for (const auto s : kAllSentiments) {
        const auto c = index_of(s);
        j["per_class"][std::string(to_string(s))] = {
            {"precision", r.precision[c]}, {"recall", r.recall[c]}, {"f1", r.f1[c]}};
    }
    j["meta"] = {{"model", r.meta.model},
                 {"modality", r.meta.modality},
                 {"seed", r.meta.seed},
                 {"config_hash", r.meta.config_hash},
                 {"timestamp", r.meta.timestamp}};
    return j;
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
    try {
        EvalReport r;
        r.confusion.counts = j.at("confusion").get<decltype(r.confusion.counts)>();
        r.macro_f1 = j.at("macro_f1").get<double>();
        for (const auto s : kAllSentiments) {
            const auto& pc = j.at("per_class").at(std::string(to_string(s)));
            const auto c = index_of(s);
            r.precision[c] = pc.at("precision").get<double>();
            r.recall[c] = pc.at("recall").get<double>();
            r.f1[c] = pc.at("f1").get<double>();
        }
        if (j.contains("meta")) {
            const auto& m = j.at("meta");
            r.meta.model = m.value("model", "");
            r.meta.modality = m.value("modality", "");
            r.meta.seed = m.value("seed", std::uint64_t{0});
            r.meta.config_hash = m.value("config_hash", "");
            r.meta.timestamp = m.value("timestamp", "");
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed evaluation report: ") + e.what());
    }
}

std::string format_text(const EvalReport& r) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    if (!r.meta.model.empty()) out << "model: " << r.meta.model << " (" << r.meta.modality << ")\n";
    out << "macro-F1: " << r.macro_f1 << "\n\n";
    out << std::left << std::setw(10) << "class" << std::right << std::setw(11) << "precision" << std::setw(9)
        << "recall" << std::setw(9) << "f1" << "\n";
    for (const auto s : kAllSentiments) {
        const auto c = index_of(s);
        out << std::left << std::setw(10) << to_string(s) << std::right << std::setw(11) << r.precision[c]
            << std::setw(9) << r.recall[c] << std::setw(9) << r.f1[c] << "\n";
    }
    out << "\nconfusion (rows = gold, cols = predicted: neg neu pos)\n";
    for (const auto s : kAllSentiments) {
        out << std::left << std::setw(10) << to_string(s) << std::right;
        for (auto v : r.confusion.counts[index_of(s)]) out << std::setw(8) << v;
        out << "\n";
    }
    return out.str();
}

}  // namespace memesent
