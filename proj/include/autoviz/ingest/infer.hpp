#pragma once

#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "autoviz/dataset.hpp"
#include "autoviz/numeric.hpp"

namespace autoviz::ingest {

inline constexpr double kNumericShareThreshold = 0.95;

struct InferOptions {
    /// Compared case-insensitively against the trimmed cell text.
    std::set<std::string> missing_tokens{"", "na", "n/a", "null", "none", "nan", "-"};
};

struct InferResult {
    Dataset dataset;
    std::vector<std::string> warnings;
};

namespace detail {

inline bool is_missing_token(std::string_view cell, const std::set<std::string>& tokens) {
    return tokens.count(to_lower_ascii(trim(cell))) > 0;
}

/// 1 for a true token, 0 for false, -1 otherwise.
inline int boolean_token(std::string_view cell) {
    const auto t = to_lower_ascii(trim(cell));
    if (t == "true" || t == "yes" || t == "1") return 1;
    if (t == "false" || t == "no" || t == "0") return 0;
    return -1;
}

inline Column infer_column(const Column& col, const InferOptions& options, std::vector<std::string>& warnings) {
    const std::size_t n = col.size();
    if (col.kind() != ColumnKind::text) {
        // Already typed: infer from the rendered text so the result is stable.
        std::vector<std::optional<std::string>> cells(n);
        for (std::size_t i = 0; i < n; ++i) cells[i] = col.cell_text(i);
        return infer_column(Column::text(col.name(), cells), options, warnings);
    }

    std::vector<std::uint8_t> usable(n, 0);
    std::size_t non_missing = 0;
    std::size_t numeric = 0;
    bool all_boolean = true;
    bool seen_true = false;
    bool seen_false = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (!col.is_present(i)) continue;
        const auto cell = col.label(i);
        if (is_missing_token(cell, options.missing_tokens)) continue;
        usable[i] = 1;
        ++non_missing;
        if (parse_number(cell)) ++numeric;
        if (all_boolean) {
            const int b = boolean_token(cell);
            if (b < 0) all_boolean = false;
            else (b ? seen_true : seen_false) = true;
        }
    }

    if (non_missing > 0 && static_cast<double>(numeric) >= kNumericShareThreshold * static_cast<double>(non_missing)) {
        std::vector<double> values(n, 0.0);
        std::vector<std::uint8_t> present(n, 0);
        std::size_t coerced = 0;
        std::string example;
        for (std::size_t i = 0; i < n; ++i) {
            if (!usable[i]) continue;
            if (const auto v = parse_number(col.label(i))) {
                values[i] = *v;
                present[i] = 1;
            } else {
                if (coerced == 0) example = std::string(col.label(i));
                ++coerced;
            }
        }
        if (coerced > 0) {
            warnings.push_back("column '" + col.name() + "': " + std::to_string(coerced) +
                               " non-numeric cell(s) set to missing (e.g. '" + example + "')");
        }
        return Column::numeric(col.name(), std::move(values), std::move(present));
    }

    if (non_missing > 0 && all_boolean && seen_true && seen_false) {
        std::vector<std::uint32_t> codes(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (usable[i]) codes[i] = static_cast<std::uint32_t>(boolean_token(col.label(i)));
        }
        return Column::categorical(col.name(), std::move(codes), {"false", "true"}, std::move(usable),
                                   ColumnKind::boolean);
    }

    std::vector<std::uint32_t> codes(n, 0);
    std::vector<std::string> levels;
    std::unordered_map<std::string_view, std::uint32_t> lookup;
    for (std::size_t i = 0; i < n; ++i) {
        if (!usable[i]) continue;
        const auto cell = col.label(i);
        auto [it, inserted] = lookup.try_emplace(cell, static_cast<std::uint32_t>(levels.size()));
        if (inserted) levels.emplace_back(cell);
        codes[i] = it->second;
    }
    return Column::categorical(col.name(), std::move(codes), std::move(levels), std::move(usable));
}

} // namespace detail

/// Assigns each column a kind: numeric when at least 95% of the non-missing
/// cells parse as numbers (the rest become missing), boolean when every cell
/// is a true/false/yes/no/0/1 token with both values present, else categorical.
/// Columns are converted one at a time and their text released as they go.
inline InferResult infer_types(Dataset untyped, const InferOptions& options = {}) {
    InferResult result;
    auto columns = std::move(untyped).release_columns();
    std::vector<Column> typed;
    typed.reserve(columns.size());
    for (auto& col : columns) {
        typed.push_back(detail::infer_column(col, options, result.warnings));
        col = Column();
    }
    result.dataset = Dataset(std::move(typed));
    return result;
}

} // namespace autoviz::ingest
