#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "autoviz/error.hpp"
#include "autoviz/ingest/encoding.hpp"
#include "autoviz/numeric.hpp"

namespace autoviz::ingest {

inline constexpr std::array<char, 4> kDelimiterCandidates{',', '\t', ';', '|'};
inline constexpr std::size_t kDefaultSampleBytes = 64 * 1024;
inline constexpr std::size_t kMinSampleBytes = 1024;
inline constexpr std::size_t kDialectSampleLines = 20;

struct Dialect {
    char delimiter = ',';
    char quote = '"';
    bool has_header = true;
    Encoding encoding = Encoding::utf8;
    /// Set when no candidate delimiter occurred and comma was assumed.
    bool delimiter_fallback = false;

    friend bool operator==(const Dialect&, const Dialect&) = default;
};

inline std::string delimiter_name(char delimiter) {
    switch (delimiter) {
    case ',': return "comma";
    case '\t': return "tab";
    case ';': return "semicolon";
    case '|': return "pipe";
    default: return std::string(1, delimiter);
    }
}

namespace detail {

/// Splits text into records at newlines outside quotes; a trailing '\r' is dropped.
inline std::vector<std::string_view> split_records(std::string_view text, char quote, bool drop_partial_tail) {
    std::vector<std::string_view> records;
    bool in_quotes = false;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (ch == quote) {
            in_quotes = !in_quotes;
        } else if (ch == '\n' && !in_quotes) {
            std::size_t end = i;
            if (end > start && text[end - 1] == '\r') --end;
            records.push_back(text.substr(start, end - start));
            start = i + 1;
        }
    }
    if (start < text.size() && !(drop_partial_tail && !records.empty())) {
        std::size_t end = text.size();
        if (text[end - 1] == '\r') --end;
        records.push_back(text.substr(start, end - start));
    }
    return records;
}

inline std::size_t count_unquoted(std::string_view record, char delimiter, char quote) {
    std::size_t count = 0;
    bool in_quotes = false;
    for (const char ch : record) {
        if (ch == quote) in_quotes = !in_quotes;
        else if (ch == delimiter && !in_quotes) ++count;
    }
    return count;
}

/// Splits one record into unquoted cells (doubled quotes collapse to one).
inline std::vector<std::string> split_cells(std::string_view record, char delimiter, char quote) {
    std::vector<std::string> cells(1);
    bool in_quotes = false;
    for (std::size_t i = 0; i < record.size(); ++i) {
        const char ch = record[i];
        if (in_quotes) {
            if (ch == quote) {
                if (i + 1 < record.size() && record[i + 1] == quote) {
                    cells.back().push_back(quote);
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cells.back().push_back(ch);
            }
        } else if (ch == quote) {
            in_quotes = true;
        } else if (ch == delimiter) {
            cells.emplace_back();
        } else {
            cells.back().push_back(ch);
        }
    }
    return cells;
}

inline bool looks_numeric(std::string_view cell) { return parse_number(cell).has_value(); }

/// Header heuristic: row 1 is textual and either sits above mostly numeric
/// positions, or is duplicate-free above a column whose data values repeat.
inline bool detect_header(const std::vector<std::vector<std::string>>& rows) {
    if (rows.size() < 2) return false;
    const auto& first = rows.front();
    bool any_text = false;
    for (const auto& cell : first) {
        if (trim(cell).empty()) continue;
        if (looks_numeric(cell)) return false;
        any_text = true;
    }
    if (!any_text) return false;

    const std::size_t data_rows = rows.size() - 1;
    for (std::size_t j = 0; j < first.size(); ++j) {
        if (trim(first[j]).empty()) continue;
        std::size_t numeric = 0;
        for (std::size_t r = 1; r < rows.size(); ++r) {
            if (j < rows[r].size() && looks_numeric(rows[r][j])) ++numeric;
        }
        if (2 * numeric >= data_rows) return true;
    }

    std::unordered_set<std::string_view> seen;
    for (const auto& cell : first) {
        if (!seen.insert(cell).second) return false;
    }
    for (std::size_t j = 0; j < first.size(); ++j) {
        std::unordered_set<std::string_view> values;
        bool duplicated = false;
        bool header_value_reused = false;
        for (std::size_t r = 1; r < rows.size(); ++r) {
            if (j >= rows[r].size()) continue;
            const std::string_view v = rows[r][j];
            if (!values.insert(v).second) duplicated = true;
            if (v == first[j]) header_value_reused = true;
        }
        if (duplicated && !header_value_reused) return true;
    }
    return false;
}

} // namespace detail

/// Infers delimiter, header presence and encoding from the leading bytes of a file.
///
/// The delimiter is the candidate whose per-record count is most consistent
/// (lowest variance, then highest mean, then candidate order) over the first
/// 20 non-empty records. Counts only include delimiters outside quotes.
inline Dialect detect_dialect(std::string_view sample, std::size_t max_sample_bytes = kDefaultSampleBytes) {
    if (max_sample_bytes < kMinSampleBytes) {
        throw Error(ErrorCode::invalid_argument, "max_sample_bytes must be at least 1024");
    }
    const bool truncated = sample.size() >= max_sample_bytes;
    sample = sample.substr(0, max_sample_bytes);

    Dialect dialect;
    if (sample.starts_with(kUtf8Bom)) {
        sample.remove_prefix(kUtf8Bom.size());
        dialect.encoding = Encoding::utf8_bom;
    } else {
        dialect.encoding = is_valid_utf8(sample, truncated) ? Encoding::utf8 : Encoding::latin1;
    }
    if (dialect.encoding == Encoding::utf8_bom && !is_valid_utf8(sample, truncated)) {
        dialect.encoding = Encoding::latin1;
    }

    std::vector<std::string_view> lines;
    for (const auto record : detail::split_records(sample, dialect.quote, truncated)) {
        if (record.empty()) continue;
        lines.push_back(record);
        if (lines.size() == kDialectSampleLines) break;
    }
    if (lines.empty()) throw Error(ErrorCode::empty_input, "input contains no non-empty lines");

    const auto n = static_cast<std::int64_t>(lines.size());
    bool found = false;
    std::int64_t best_spread = 0;
    std::int64_t best_sum = 0;
    for (const char candidate : kDelimiterCandidates) {
        std::int64_t sum = 0;
        std::int64_t sum_sq = 0;
        for (const auto line : lines) {
            const auto c = static_cast<std::int64_t>(detail::count_unquoted(line, candidate, dialect.quote));
            sum += c;
            sum_sq += c * c;
        }
        if (sum == 0) continue;
        // n^2 * variance, exact in integers
        const std::int64_t spread = n * sum_sq - sum * sum;
        if (!found || spread < best_spread || (spread == best_spread && sum > best_sum)) {
            found = true;
            best_spread = spread;
            best_sum = sum;
            dialect.delimiter = candidate;
        }
    }
    if (!found) {
        dialect.delimiter = ',';
        dialect.delimiter_fallback = true;
    }

    std::vector<std::vector<std::string>> rows;
    rows.reserve(lines.size());
    for (const auto line : lines) rows.push_back(detail::split_cells(line, dialect.delimiter, dialect.quote));
    dialect.has_header = detail::detect_header(rows);
    return dialect;
}

} // namespace autoviz::ingest
