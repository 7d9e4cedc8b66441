#pragma once

#include <algorithm>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "autoviz/cleaning/impute.hpp"
#include "autoviz/cleaning/outliers.hpp"
#include "autoviz/cleaning/scaling.hpp"
#include "autoviz/cleaning/transform.hpp"
#include "autoviz/cleaning/types.hpp"
#include "autoviz/dataset.hpp"
#include "autoviz/ingest/writer.hpp"

namespace autoviz::cleaning {

struct CleanResult {
    Dataset dataset;
    CleaningReport report;
};

inline double completeness(const Dataset& data) {
    const double cells = static_cast<double>(data.row_count()) * static_cast<double>(data.column_count());
    if (cells == 0.0) return 1.0;
    double present = 0.0;
    for (const auto& c : data.columns()) present += static_cast<double>(c.present_count());
    return present / cells;
}

/// impute -> flag outliers -> [cap] -> [transform] -> [scale] -> [encode].
/// Columns with no values are dropped with a warning; every change lands in the report.
inline CleanResult clean_pipeline(Dataset data, const CleaningConfig& config = {}) {
    config.validate();
    CleaningReport report;
    report.input_digest = ingest::dataset_digest(data);
    report.completeness_before = completeness(data);

    if (data.row_count() == 0) throw Error(ErrorCode::empty_table, "nothing to clean: the table has no rows");
    for (const auto& col : data.columns()) {
        if (col.kind() == ColumnKind::text) {
            throw Error(ErrorCode::invalid_argument, "column '" + col.name() + "' is untyped; run type inference first");
        }
    }

    // drop columns with nothing to impute from
    {
        std::vector<Column> kept;
        auto columns = std::move(data).release_columns();
        for (auto& col : columns) {
            if (col.present_count() == 0) {
                report.dropped_columns.push_back(col.name());
                report.warnings.push_back("column '" + col.name() + "' has no values and was dropped");
                continue;
            }
            kept.push_back(std::move(col));
        }
        data = Dataset(std::move(kept));
    }

    // imputation
    std::vector<Column> columns;
    {
        std::size_t missing = 0;
        for (const auto& col : data.columns()) missing += col.missing_count();
        report.imputations.reserve(missing);
        columns.reserve(data.column_count());
        auto keep = [&](ImputedColumn imputed) {
            for (auto& entry : imputed.ledger) report.imputations.push_back(std::move(entry));
            columns.push_back(std::move(imputed.column));
        };
        // numeric columns arrive in column order; everything between them is mode-imputed
        std::size_t next = 0;
        KnnImputer(data, config.imputation).impute_all([&](std::size_t index, ImputedColumn imputed) {
            for (; next < index; ++next) keep(impute_categorical_mode(data.column(next)));
            keep(std::move(imputed));
            ++next;
        });
        for (; next < data.column_count(); ++next) keep(impute_categorical_mode(data.column(next)));
    }
    data = Dataset{};

    for (auto& col : columns) {
        if (col.kind() != ColumnKind::numeric) continue;
        const auto values = col.numbers();

        // outlier flags, ordered by row then detector
        std::vector<OutlierEntry> flags;
        for (const auto detector : {Detector::zscore, Detector::modified_z, Detector::iqr}) {
            try {
                for (const auto& f : detect_outliers(detector, values, config.outliers)) {
                    flags.push_back({col.name(), f.row, f.value, detector, f.score});
                }
            } catch (const Error& e) {
                report.warnings.push_back("column '" + col.name() + "': " + std::string(to_string(detector)) +
                                          " detector skipped: " + e.what());
            }
        }
        std::stable_sort(flags.begin(), flags.end(), [](const OutlierEntry& a, const OutlierEntry& b) { return a.row < b.row; });
        const bool flagged = !flags.empty();
        for (auto& f : flags) report.outlier_flags.push_back(std::move(f));

        std::vector<double> current(values.begin(), values.end());
        bool changed = false;

        if (config.cap_outliers && current.size() >= 4) {
            const auto fences = iqr_fences(current, config.outliers.iqr_multiplier);
            for (std::size_t i = 0; i < current.size(); ++i) {
                const double capped = std::clamp(current[i], fences.lower, fences.upper);
                if (capped == current[i]) continue;
                report.outlier_caps.push_back({col.name(), i, current[i], capped});
                current[i] = capped;
                changed = true;
            }
        }

        if (config.transform != TransformMethod::none) {
            try {
                auto t = transform_skewed(current, config.transform);
                if (t.applied != TransformMethod::none) {
                    report.transforms.push_back({col.name(), std::string(to_string(t.applied)), t.parameters(), {col.name()}});
                    current = std::move(t.values);
                    changed = true;
                }
            } catch (const Error& e) {
                report.warnings.push_back("column '" + col.name() + "': transform skipped: " + e.what());
            }
        }

        if (config.scaling) {
            const auto choice =
                config.force_scaler ? fit_scaler(current, *config.force_scaler) : select_scaler(current, flagged);
            if (config.force_scaler && choice.method != *config.force_scaler) {
                report.warnings.push_back("column '" + col.name() + "': " + std::string(to_string(*config.force_scaler)) +
                                          " scaling has a zero denominator; left unscaled");
            }
            report.scalings.push_back({col.name(), choice});
            if (choice.method != ScalingMethod::none) {
                current = apply_scaling(current, choice);
                changed = true;
            }
        }

        if (changed) col = Column::numeric(col.name(), std::move(current));
    }

    if (config.encoding != EncodingMethod::none) {
        std::unordered_set<std::string> names;
        for (const auto& c : columns) names.insert(c.name());
        std::vector<Column> encoded;
        for (auto& col : columns) {
            if (!is_discrete(col.kind())) {
                encoded.push_back(std::move(col));
                continue;
            }
            try {
                auto parts = encode_categorical(col, config.encoding);
                TransformEntry entry{col.name(), std::string(to_string(config.encoding)), {}, {}};
                names.erase(col.name());
                for (auto& part : parts) {
                    std::string name = part.name();
                    for (int suffix = 2; names.count(name); ++suffix) name = part.name() + "_" + std::to_string(suffix);
                    names.insert(name);
                    entry.outputs.push_back(name);
                    encoded.push_back(name == part.name() ? std::move(part) : part.renamed(name));
                }
                std::unordered_set<std::uint32_t> distinct(col.codes().begin(), col.codes().end());
                entry.parameters.push_back({"categories", static_cast<double>(distinct.size())});
                report.transforms.push_back(std::move(entry));
            } catch (const Error& e) {
                report.warnings.push_back("column '" + col.name() + "': encoding skipped: " + e.what());
                encoded.push_back(std::move(col));
            }
        }
        columns = std::move(encoded);
    }

    CleanResult out{Dataset(std::move(columns)), std::move(report)};
    out.report.completeness_after = completeness(out.dataset);
    out.report.output_digest = ingest::dataset_digest(out.dataset);
    return out;
}

} // namespace autoviz::cleaning
