#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "autoviz/analysis/stats.hpp"
#include "autoviz/dataset.hpp"

namespace autoviz::ingest {

struct ColumnProfile {
    std::string name;
    ColumnKind kind = ColumnKind::text;
    std::size_t count = 0;
    std::size_t missing_count = 0;
    double completeness = 1.0;
    std::size_t distinct_count = 0;
    std::optional<analysis::SummaryStats> stats; // numeric columns with at least one value
};

inline ColumnProfile profile_column(const Column& col) {
    ColumnProfile p;
    p.name = col.name();
    p.kind = col.kind();
    p.count = col.size();
    p.missing_count = col.missing_count();
    p.completeness = p.count > 0 ? static_cast<double>(p.count - p.missing_count) / static_cast<double>(p.count) : 1.0;

    if (col.kind() == ColumnKind::numeric) {
        auto values = col.present_numbers();
        if (!values.empty()) {
            p.stats = analysis::summary_stats(values);
            std::sort(values.begin(), values.end());
            p.distinct_count = static_cast<std::size_t>(std::unique(values.begin(), values.end()) - values.begin());
        }
    } else if (is_discrete(col.kind())) {
        std::vector<std::uint8_t> used(col.levels().size(), 0);
        for (std::size_t i = 0; i < col.size(); ++i) {
            if (col.is_present(i)) used[col.codes()[i]] = 1;
        }
        p.distinct_count = static_cast<std::size_t>(std::count(used.begin(), used.end(), std::uint8_t{1}));
    } else {
        std::vector<std::string_view> seen;
        for (std::size_t i = 0; i < col.size(); ++i) {
            if (col.is_present(i)) seen.push_back(col.label(i));
        }
        std::sort(seen.begin(), seen.end());
        p.distinct_count = static_cast<std::size_t>(std::unique(seen.begin(), seen.end()) - seen.begin());
    }
    return p;
}

inline std::vector<ColumnProfile> profile_columns(const Dataset& data) {
    std::vector<ColumnProfile> out;
    out.reserve(data.column_count());
    for (const auto& col : data.columns()) out.push_back(profile_column(col));
    return out;
}

} // namespace autoviz::ingest
