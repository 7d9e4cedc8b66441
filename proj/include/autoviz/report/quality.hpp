#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "autoviz/cleaning/types.hpp"
#include "autoviz/ingest/profile.hpp"

namespace autoviz::report {

struct QualityMetrics {
    std::size_t rows_processed = 0;
    double completeness_before = 1.0;
    double completeness_after = 1.0;
    std::size_t outlier_flag_count = 0;
    std::size_t transformations_applied = 0;
    std::map<std::string, double> per_column_quality;
};

/// per-column quality = completeness_after * (1 - flagged_fraction / 2), where
/// flagged_fraction counts rows flagged by at least one detector.
inline QualityMetrics quality_metrics(const std::vector<ingest::ColumnProfile>& before,
                                      const std::vector<ingest::ColumnProfile>& after,
                                      const cleaning::CleaningReport& cleaning) {
    QualityMetrics q;
    q.rows_processed = before.empty() ? 0 : before.front().count;
    q.completeness_before = cleaning.completeness_before;
    q.completeness_after = cleaning.completeness_after;
    q.outlier_flag_count = cleaning.outlier_flags.size();
    q.transformations_applied = cleaning.transforms.size();

    std::map<std::string, std::set<std::size_t>> flagged;
    for (const auto& f : cleaning.outlier_flags) flagged[f.column].insert(f.row);
    for (const auto& p : after) {
        double fraction = 0.0;
        if (const auto it = flagged.find(p.name); it != flagged.end() && p.count > 0) {
            fraction = static_cast<double>(it->second.size()) / static_cast<double>(p.count);
        }
        q.per_column_quality[p.name] = std::clamp(p.completeness * (1.0 - fraction / 2.0), 0.0, 1.0);
    }
    return q;
}

} // namespace autoviz::report
