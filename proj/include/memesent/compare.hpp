#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace memesent {

struct CompareEntry {
    std::string model;
    std::string modality;  // e.g. "text", "text-image"
    double macro_f1 = 0.0;
};

/// Rows sorted by macro-F1, best first; equal scores keep input order.
struct ComparisonTable {
    std::vector<CompareEntry> rows;
};

ComparisonTable compare_report(std::vector<CompareEntry> entries);

nlohmann::json to_json(const ComparisonTable& table);
ComparisonTable comparison_from_json(const nlohmann::json& j);
/// Aligned plain-text table: Modality | Model | Macro-F1.
std::string format_text(const ComparisonTable& table);

}  // namespace memesent
