#include "memesent/csv.hpp"

namespace memesent {

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    return std::nullopt;
}

CsvTable parse_csv(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

    std::vector<std::vector<std::string>> records;
    std::vector<std::size_t> lines;

    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool after_closing_quote = false;
    bool record_started = false;
    std::size_t line = 1;
    std::size_t record_line = 1;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
        after_closing_quote = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        lines.push_back(record_line);
        record.clear();
        record_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (!record_started) {
            record_started = true;
            record_line = line;
        }
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                    after_closing_quote = true;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case ',':
                end_field();
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
                [[fallthrough]];
            case '\n':
                end_record();
                ++line;
                break;
            case '"':
                if (!field.empty() || field_was_quoted) {
                    throw CsvError("line " + std::to_string(line) +
                                   ": quote character inside an unquoted field");
                }
                in_quotes = true;
                field_was_quoted = true;
                break;
            default:
                if (after_closing_quote) {
                    throw CsvError("line " + std::to_string(line) +
                                   ": unexpected character after closing quote");
                }
                field.push_back(c);
        }
    }
    if (in_quotes) {
        throw CsvError("line " + std::to_string(record_line) + ": unterminated quoted field");
    }
    if (record_started) end_record();

    CsvTable table;
    if (records.empty()) return table;
    table.header = std::move(records.front());
    for (std::size_t r = 1; r < records.size(); ++r) {
        auto& row = records[r];
        // Skip blank lines.
        if (row.size() == 1 && row.front().empty()) continue;
        if (row.size() != table.header.size()) {
            throw CsvError("line " + std::to_string(lines[r]) + ": expected " +
                           std::to_string(table.header.size()) + " fields, found " +
                           std::to_string(row.size()));
        }
        table.rows.push_back(std::move(row));
        table.row_lines.push_back(lines[r]);
    }
    return table;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += csv_escape(fields[i]);
    }
    out.push_back('\n');
    return out;
}

}  // namespace memesent
