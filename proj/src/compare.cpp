#include "memesent/compare.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "memesent/errors.hpp"

namespace memesent {

ComparisonTable compare_report(std::vector<CompareEntry> entries) {
    if (entries.empty()) throw ValidationError("comparison needs at least one entry");
    std::stable_sort(entries.begin(), entries.end(),
                     [](const CompareEntry& a, const CompareEntry& b) { return a.macro_f1 > b.macro_f1; });
    return ComparisonTable{std::move(entries)};
}

nlohmann::json to_json(const ComparisonTable& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : table.rows) {
        rows.push_back({{"modality", e.modality}, {"model", e.model}, {"macro_f1", e.macro_f1}});
    }
    return {{"rows", rows}};
}

ComparisonTable comparison_from_json(const nlohmann::json& j) {
    ComparisonTable t;
    for (const auto& r : j.at("rows")) {
        t.rows.push_back({r.at("model").get<std::string>(), r.at("modality").get<std::string>(),
                          r.at("macro_f1").get<double>()});
    }
    return t;
}

std::string format_text(const ComparisonTable& table) {
    std::size_t w_mod = std::string("Modality").size();
    std::size_t w_model = std::string("Model").size();
    for (const auto& e : table.rows) {
        w_mod = std::max(w_mod, e.modality.size());
        w_model = std::max(w_model, e.model.size());
    }
    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(w_mod)) << "Modality" << "  " << std::setw(static_cast<int>(w_model))
        << "Model" << "  Macro-F1\n";
    out << std::string(w_mod, '-') << "  " << std::string(w_model, '-') << "  --------\n";
    out << std::fixed << std::setprecision(4);
    for (const auto& e : table.rows) {
        out << std::setw(static_cast<int>(w_mod)) << e.modality << "  " << std::setw(static_cast<int>(w_model))
            << e.model << "  " << e.macro_f1 << "\n";
    }
    return out.str();
}

}  // namespace memesent
