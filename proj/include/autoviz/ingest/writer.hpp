#pragma once

#include <ostream>
#include <string>
#include <string_view>

#include "autoviz/dataset.hpp"
#include "autoviz/digest.hpp"
#include "autoviz/ingest/dialect.hpp"

namespace autoviz::ingest {

inline void write_field(std::ostream& out, std::string_view field, char delimiter, char quote, bool force_quotes) {
    const bool needs_quotes = force_quotes || field.find(delimiter) != std::string_view::npos ||
                              field.find(quote) != std::string_view::npos ||
                              field.find_first_of("\r\n") != std::string_view::npos;
    if (!needs_quotes) {
        out << field;
        return;
    }
    out << quote;
    for (const char ch : field) {
        if (ch == quote) out << quote;
        out << ch;
    }
    out << quote;
}

/// Writes RFC-4180 style delimited text.
///
/// Missing cells are written as empty unquoted fields and present empty
/// strings as "", which the parser reads back as missing and empty
/// respectively. A single-column table cannot express an empty unquoted line
/// (blank lines are skipped), so its missing cells are written as "".
inline void write_csv(std::ostream& out, const Dataset& data, char delimiter = ',', char quote = '"',
                      bool header = true) {
    const auto& cols = data.columns();
    const bool single = cols.size() == 1;
    if (header) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (j) out << delimiter;
            write_field(out, cols[j].name(), delimiter, quote, single && cols[j].name().empty());
        }
        out << '\n';
    }
    std::string cell;
    for (std::size_t i = 0; i < data.row_count(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (j) out << delimiter;
            const auto& col = cols[j];
            if (!col.is_present(i)) {
                if (single) out << quote << quote;
                continue;
            }
            if (col.kind() == ColumnKind::numeric) {
                out << format_number(col.numbers()[i]);
            } else {
                const auto label = col.label(i);
                write_field(out, label, delimiter, quote, label.empty());
            }
        }
        out << '\n';
    }
}

inline void write_csv(std::ostream& out, const Dataset& data, const Dialect& dialect, bool header = true) {
    write_csv(out, data, dialect.delimiter, dialect.quote, header);
}

/// SHA-256 of the table's canonical comma-separated serialisation.
inline std::string dataset_digest(const Dataset& data) {
    HashingStreambuf sink;
    std::ostream out(&sink);
    write_csv(out, data);
    out.flush();
    return sink.hex();
}

} // namespace autoviz::ingest
