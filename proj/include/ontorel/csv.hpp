#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "ontorel/errors.hpp"

namespace ontorel {

// Minimal RFC-4180 reading/writing. Writers emit LF line endings and quote
// only when required; readers accept LF and CRLF and quoted fields spanning
// newlines.

inline bool csv_needs_quoting(const std::string& field) {
    return field.find_first_of(",\"\n\r") != std::string::npos;
}

inline std::string csv_escape(const std::string& field) {
    if (!csv_needs_quoting(field)) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

inline void csv_write_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << csv_escape(fields[i]);
    }
    os << '\n';
}

/// Reads all rows. Empty lines outside quotes are skipped. Throws ParseError
/// (with the row's starting line number) on a quote that never closes or a
/// stray quote inside an unquoted field.
inline std::vector<std::vector<std::string>> csv_read(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool row_has_content = false;
    std::size_t line = 1;
    std::size_t row_start_line = 1;

    auto end_field = [&] {
        row.push_back(field);
        field.clear();
        field_was_quoted = false;
    };
    auto end_row = [&] {
        if (row_has_content || !row.empty()) {
            end_field();
            rows.push_back(row);
            row.clear();
        }
        row_has_content = false;
        row_start_line = line;
    };

    char c;
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty() || field_was_quoted)
                throw ParseError("unexpected quote inside unquoted field", row_start_line);
            in_quotes = true;
            field_was_quoted = true;
            row_has_content = true;
            break;
        case ',':
            end_field();
            row_has_content = true;
            break;
        case '\r':
            break;
        case '\n':
            ++line;
            end_row();
            break;
        default:
            field += c;
            row_has_content = true;
            break;
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field", row_start_line);
    end_row();
    return rows;
}

} // namespace ontorel
