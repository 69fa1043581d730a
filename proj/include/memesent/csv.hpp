#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "memesent/errors.hpp"

namespace memesent {

class CsvError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// RFC-4180 table: header row plus data rows. Quoted fields may contain
/// commas, doubled quotes and line breaks.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_lines;  // 1-based source line where each row starts

    std::optional<std::size_t> column(std::string_view name) const;
};

/// Throws CsvError on malformed quoting or ragged rows. A UTF-8 BOM is skipped.
CsvTable parse_csv(std::string_view text);

std::string csv_escape(std::string_view field);
std::string csv_row(const std::vector<std::string>& fields);

}  // namespace memesent
